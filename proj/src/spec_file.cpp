#include "spec_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace peakheight::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
      throw SpecSyntaxError("spec: '" + key + "' has a malformed number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw SpecSyntaxError("spec: '" + key + "' is empty");
  return out;
}

}  // namespace

CovarianceSpec parse_covariance_spec(std::istream& in) {
  std::map<std::string, std::vector<double>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecSyntaxError("spec line " + std::to_string(lineno) + ": expected key = values");
    const std::string key = trim(line.substr(0, eq));
    if (key != "weights" && key != "scales" && key != "fourier" && key != "betas")
      throw SpecSyntaxError("spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (entries.count(key)) throw SpecSyntaxError("spec: duplicate key '" + key + "'");
    entries[key] = parse_list(key, line.substr(eq + 1));
  }

  const bool has_w = entries.count("weights") > 0;
  const bool has_s = entries.count("scales") > 0;
  const bool has_f = entries.count("fourier") > 0;
  const bool has_b = entries.count("betas") > 0;

  if (has_f && !has_w && !has_s && !has_b) return CovarianceSpec::circle_fourier(entries["fourier"]);
  if (has_w && (has_s != has_b) && !has_f) {
    const auto& w = entries["weights"];
    const auto& other = has_s ? entries["scales"] : entries["betas"];
    if (w.size() != other.size())
      throw SpecSyntaxError(std::string("spec: weights and ") + (has_s ? "scales" : "betas") + " differ in length");
    if (has_s) {
      std::vector<MixtureComponent> comps;
      for (std::size_t i = 0; i < w.size(); ++i) comps.push_back({w[i], other[i]});
      return CovarianceSpec::gaussian_mixture(std::move(comps));
    }
    std::vector<std::pair<double, double>> vm;
    for (std::size_t i = 0; i < w.size(); ++i) vm.emplace_back(w[i], other[i]);
    return CovarianceSpec::von_mises_mixture(vm);
  }
  throw SpecSyntaxError("spec: give weights+scales, weights+betas, or fourier");
}

CovarianceSpec load_covariance_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecSyntaxError("cannot open spec file '" + path + "'");
  return parse_covariance_spec(in);
}

}  // namespace peakheight::cli
