#pragma once

#include "kspread/dynamics.hpp"
#include "kspread/krylov.hpp"
#include "kspread/normalize.hpp"
#include "kspread/spectral.hpp"
#include "kspread/spin_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace kspread {

using nlohmann::json;

json to_json(const SpinChainParams& p);
SpinChainParams params_from_json(const json& j);

// {params, operator, K, b[], termination}
json lanczos_record(const SpinChainParams& params, Sector sector, const std::string& op, const LanczosResult& r);

// {K, tau, kc_mean, kc_std, kc_infinite}
json trace_summary(const ComplexityTrace& trace);

// Columns n, b_n (n starting at 1).
void write_coefficients_csv(const std::filesystem::path& file, std::span<const double> b);
std::vector<double> read_coefficients_csv(const std::filesystem::path& file);
// Columns t, K_C.
void write_trace_csv(const std::filesystem::path& file, std::span<const double> times, std::span<const double> kc);

struct EtaRow {
  double hz;
  EtaResult result;
};
// Columns h_z, r_mean, eta.
void write_eta_csv(const std::filesystem::path& file, std::span<const EtaRow> rows);
// Columns hz, eta, sigma_raw, kc_raw, sigma_norm, kc_norm.
void write_curves_csv(const std::filesystem::path& file, const CurveSet& curves);

// Column-oriented CSV with a header line; values at full double precision.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_json(const std::filesystem::path& file, const json& j);
json read_json(const std::filesystem::path& file);

} // namespace kspread
