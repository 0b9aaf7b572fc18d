#include "kspread/io.hpp"

#include "kspread/error.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace kspread {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream os(file);
  if (!os) throw Error("cannot open '" + file.string() + "' for writing");
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  return os;
}

} // namespace

json to_json(const SpinChainParams& p) { return {{"L", p.L}, {"J", p.J}, {"hx", p.hx}, {"hz", p.hz}}; }

SpinChainParams params_from_json(const json& j) {
  SpinChainParams p;
  p.L = j.value("L", p.L);
  p.J = j.value("J", p.J);
  p.hx = j.value("hx", p.hx);
  p.hz = j.value("hz", p.hz);
  return p;
}

json lanczos_record(const SpinChainParams& params, Sector sector, const std::string& op, const LanczosResult& r) {
  return {{"params", to_json(params)},
          {"sector", std::string(to_string(sector))},
          {"operator", op},
          {"K", r.K},
          {"b", r.b},
          {"termination", std::string(to_string(r.termination))}};
}

json trace_summary(const ComplexityTrace& t) {
  return {{"K", t.K},
          {"tau", t.saturation.tau},
          {"kc_mean", t.saturation.kc_mean},
          {"kc_std", t.saturation.kc_std},
          {"kc_infinite", t.kc_infinite},
          {"tau_fallback", t.saturation.tau_fallback}};
}

void write_csv(const fs::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InvalidArgument("CSV header and column count differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InvalidArgument("CSV columns differ in length");
  auto os = open_out(file);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c][r];
    os << '\n';
  }
}

void write_coefficients_csv(const fs::path& file, std::span<const double> b) {
  auto os = open_out(file);
  os << "n,b_n\n";
  for (std::size_t n = 0; n < b.size(); ++n) os << n + 1 << ',' << b[n] << '\n';
}

std::vector<double> read_coefficients_csv(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot open '" + file.string() + "'");
  std::string line;
  std::getline(is, line);
  std::vector<double> b;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("malformed coefficient line '" + line + "'");
    b.push_back(std::stod(line.substr(comma + 1)));
  }
  return b;
}

void write_trace_csv(const fs::path& file, std::span<const double> times, std::span<const double> kc) {
  write_csv(file, {"t", "K_C"}, {{times.begin(), times.end()}, {kc.begin(), kc.end()}});
}

void write_eta_csv(const fs::path& file, std::span<const EtaRow> rows) {
  std::vector<double> hz, r, e;
  for (const auto& row : rows) {
    hz.push_back(row.hz);
    r.push_back(row.result.r_mean);
    e.push_back(row.result.eta);
  }
  write_csv(file, {"h_z", "r_mean", "eta"}, {hz, r, e});
}

void write_curves_csv(const fs::path& file, const CurveSet& c) {
  write_csv(file, {"hz", "eta", "sigma_raw", "kc_raw", "sigma_norm", "kc_norm"},
            {c.hz, c.eta, c.sigma_raw, c.kc_raw, c.sigma_norm, c.kc_norm});
}

void write_json(const fs::path& file, const json& j) {
  auto os = open_out(file);
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot open '" + file.string() + "'");
  return json::parse(is);
}

} // namespace kspread
