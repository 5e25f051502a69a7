#include "fcs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fcs/formfactor.hpp"

namespace fcs {

namespace {

constexpr const char* kModule = "fcs_cli";

using nlohmann::json;

json real_json(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double real_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json complex_list_json(std::span<const Complex> zs) {
  json out = json::array();
  for (const auto& z : zs) out.push_back(complex_json(z));
  return out;
}

CVector complex_list_from_json(const json& j) {
  CVector out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

json twist_json(const Twist& t) {
  return {{"k1", complex_json(t.k1)}, {"k2", complex_json(t.k2)}, {"kp", complex_json(t.kp)}, {"km", complex_json(t.km)}};
}

std::string csv_complex(Complex z) { return format_double(z.real()) + ":" + format_double(z.imag()); }

std::string csv_complex_list(std::span<const Complex> zs) {
  std::string out;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (i > 0) out += ";";
    out += csv_complex(zs[i]);
  }
  return out;
}

std::vector<int> branch_indices(BranchChoice b) {
  switch (b) {
    case BranchChoice::kFirst: return {0};
    case BranchChoice::kSecond: return {1};
    case BranchChoice::kBoth: return {0, 1};
  }
  return {0};
}

void fill_errors(FcsRow& row) {
  if (!row.oracle) return;
  row.abs_err = std::abs(row.value - *row.oracle);
  const double scale = std::abs(*row.oracle);
  row.rel_err = scale > 0.0 ? row.abs_err / scale : row.abs_err;
}

}  // namespace

double FcsTable::max_rel_err() const {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.rel_err);
  return worst;
}

bool FcsReport::passed() const {
  if (config.mode != Mode::kVerify) return true;
  for (const auto& t : tables)
    if (!(t.max_rel_err() <= tolerance)) return false;
  if (max_branch_deviation && !(*max_branch_deviation <= config.tolerances.branch)) return false;
  return true;
}

FcsReport run_fcs(const RunConfig& cfg) {
  cfg.validate();
  FcsReport report;
  report.config = cfg;
  report.tolerance = cfg.tolerances.fcs_for(cfg.chain.length);
  const auto ells = cfg.ell_list();

  if (cfg.mode == Mode::kOracle) {
    const TransferEigenData data = transfer_eigen_data(cfg.twist, cfg.chain, false);
    const std::size_t idx = data.select(cfg.state);
    FcsTable table;
    table.state_index = idx;
    for (const int ell : ells) {
      FcsRow row;
      row.ell = ell;
      row.value = fcs_direct(data, idx, CountingSpec{cfg.beta, ell}, cfg.chain);
      table.rows.push_back(row);
    }
    report.tables.push_back(std::move(table));
    return report;
  }

  for (const int b : branch_indices(cfg.branch)) {
    FcsOptions opt;
    opt.state = cfg.state;
    opt.branch = b;
    opt.with_oracle = cfg.mode == Mode::kVerify;
    // beta = 0 has no rho branches; the trivial result is the same for both
    if (CountingSpec{cfg.beta, 0}.is_zero()) opt.branch = 0;
    const FcsResult res = fcs_sum(cfg.twist, cfg.beta, ells, cfg.chain, opt);
    FcsTable table;
    table.branch = b;
    table.state_index = res.state_index;
    table.lines = res.lines;
    table.admissible = res.admissible;
    table.rho1 = res.rho.side.rho1;
    table.rho2 = res.rho.side.rho2;
    table.warnings = res.warnings;
    for (const auto& ex : res.excluded) {
      table.warnings.push_back("line " + std::to_string(ex.eigen_index) + " excluded (" +
                               std::string(to_string(ex.cls)) + ")");
    }
    for (std::size_t e = 0; e < ells.size(); ++e) {
      FcsRow row;
      row.ell = ells[e];
      row.value = res.values[e];
      if (opt.with_oracle) row.oracle = res.oracle[e];
      fill_errors(row);
      table.rows.push_back(row);
    }
    report.tables.push_back(std::move(table));
  }

  if (report.tables.size() == 2) {
    double worst = 0.0;
    const auto& a = report.tables[0].rows;
    const auto& b = report.tables[1].rows;
    for (std::size_t e = 0; e < a.size(); ++e) {
      const double scale = std::max(std::abs(a[e].value), std::numeric_limits<double>::min());
      worst = std::max(worst, std::abs(a[e].value - b[e].value) / scale);
    }
    report.max_branch_deviation = worst;
  }
  return report;
}

SpectrumReport run_spectrum(const RunConfig& cfg) {
  cfg.validate();
  SpectrumReport report;
  report.config = cfg;
  if (cfg.mode == Mode::kOracle) {
    throw Error(ErrorKind::kConfig, kModule, "spectrum needs the Bethe pipeline (mode maba or verify)");
  }
  const Twist kt = tilde_twist(cfg.twist, cfg.beta);
  const auto branches = solve_rho_link(cfg.twist, kt);
  const TransferEigenData k_data = transfer_eigen_data(cfg.twist, cfg.chain, false);
  const TransferEigenData kt_data = transfer_eigen_data(kt, cfg.chain, false);
  for (const int b : branch_indices(cfg.branch)) {
    if (static_cast<std::size_t>(b) >= branches.size()) {
      throw Error(ErrorKind::kInvalidArgument, kModule,
                  "rho branch " + std::to_string(b) + " unavailable (" + std::to_string(branches.size()) +
                      " branches)");
    }
    const RhoData& rho = branches[static_cast<std::size_t>(b)];
    for (int side_id = 0; side_id < 2; ++side_id) {
      const MabaSide& side = side_id == 0 ? rho.side : rho.tilde;
      SpectrumSide out;
      out.name = side_id == 0 ? "K" : "K_tilde";
      out.branch = b;
      out.twist = side.twist;
      out.rho1 = side.rho1;
      out.rho2 = side.rho2;
      out.mu = side.mu;
      out.lines = enumerate_spectrum(side_id == 0 ? k_data : kt_data, side, cfg.chain);
      report.sides.push_back(std::move(out));
    }
  }
  return report;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json complex_json(Complex z) { return json::array({real_json(z.real()), real_json(z.imag())}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorKind::kConfig, kModule, "complex values are [re, im]");
  }
  return {real_from_json(j[0]), real_from_json(j[1])};
}

json config_json(const RunConfig& cfg) {
  json beta = json::array();
  for (const auto& b : cfg.beta) beta.push_back(complex_json(b));
  return {{"length", cfg.chain.length},
          {"c", complex_json(cfg.chain.c)},
          {"twist", twist_json(cfg.twist)},
          {"beta", beta},
          {"ell", cfg.ell_list()},
          {"state", cfg.state},
          {"branch", std::string(to_string(cfg.branch))},
          {"mode", std::string(to_string(cfg.mode))}};
}

json to_json(const FcsReport& report) {
  json tables = json::array();
  for (const auto& t : report.tables) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = {{"ell", r.ell}, {"value", complex_json(r.value)}};
      if (r.oracle) {
        row["oracle"] = complex_json(*r.oracle);
        row["abs_err"] = real_json(r.abs_err);
        row["rel_err"] = real_json(r.rel_err);
      }
      rows.push_back(row);
    }
    json tj = {{"state_index", t.state_index}, {"rows", rows}, {"warnings", t.warnings}};
    if (t.branch) {
      tj["branch"] = *t.branch;
      tj["rho"] = complex_list_json(std::vector<Complex>{t.rho1, t.rho2});
      tj["lines"] = t.lines;
      tj["admissible"] = t.admissible;
    }
    tables.push_back(tj);
  }
  json out = {{"config", config_json(report.config)}, {"tables", tables}};
  if (report.max_branch_deviation) out["max_branch_deviation"] = real_json(*report.max_branch_deviation);
  if (report.config.mode == Mode::kVerify) {
    out["tolerance"] = report.tolerance;
    out["passed"] = report.passed();
  }
  return out;
}

std::string to_csv(const FcsReport& report) {
  std::ostringstream os;
  const bool many = report.tables.size() > 1;
  for (std::size_t i = 0; i < report.tables.size(); ++i) {
    const auto& t = report.tables[i];
    if (i > 0) os << "\n";
    if (many && t.branch) os << "# branch " << *t.branch << "\n";
    os << "ell,re,im,oracle_re,oracle_im,abs_err,rel_err\n";
    for (const auto& r : t.rows) {
      os << r.ell << "," << format_double(r.value.real()) << "," << format_double(r.value.imag()) << ",";
      if (r.oracle) {
        os << format_double(r.oracle->real()) << "," << format_double(r.oracle->imag()) << ","
           << format_double(r.abs_err) << "," << format_double(r.rel_err);
      } else {
        os << ",,,";
      }
      os << "\n";
    }
  }
  if (report.max_branch_deviation) os << "\n# max_branch_deviation," << format_double(*report.max_branch_deviation) << "\n";
  return os.str();
}

std::string render(const FcsReport& report, Format format) {
  return format == Format::kJson ? to_json(report).dump(2) + "\n" : to_csv(report);
}

json line_to_json(const SpectralLine& line) {
  return {{"eigen_index", line.eigen_index},
          {"lambda", complex_list_json(line.lambda.coeffs())},
          {"q", complex_list_json(line.q.coeffs())},
          {"tq_residual", real_json(line.tq_residual)},
          {"roots", complex_list_json(line.rapidities.roots)},
          {"class", std::string(to_string(line.rapidities.cls))},
          {"residual", real_json(line.rapidities.residual)}};
}

SpectralLine line_from_json(const json& j) {
  SpectralLine line;
  line.eigen_index = j.at("eigen_index").get<std::size_t>();
  line.lambda = CPoly(complex_list_from_json(j.at("lambda")));
  line.q = CPoly(complex_list_from_json(j.at("q")));
  line.tq_residual = real_from_json(j.at("tq_residual"));
  line.rapidities.roots = complex_list_from_json(j.at("roots"));
  line.rapidities.residual = real_from_json(j.at("residual"));
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "admissible") {
    line.rapidities.cls = RootClass::kAdmissible;
  } else if (cls == "spurious") {
    line.rapidities.cls = RootClass::kSpurious;
  } else {
    line.rapidities.cls = RootClass::kUnresolved;
  }
  return line;
}

json to_json(const SpectrumReport& report) {
  json sides = json::array();
  for (const auto& s : report.sides) {
    json lines = json::array();
    for (const auto& l : s.lines) lines.push_back(line_to_json(l));
    sides.push_back({{"side", s.name},
                     {"branch", s.branch},
                     {"twist", twist_json(s.twist)},
                     {"rho", complex_list_json(std::vector<Complex>{s.rho1, s.rho2})},
                     {"mu", complex_json(s.mu)},
                     {"admissible", count_admissible(s.lines)},
                     {"lines", lines}});
  }
  return {{"config", config_json(report.config)}, {"spectra", sides}};
}

std::string to_csv(const SpectrumReport& report) {
  std::ostringstream os;
  os << "side,branch,eigen_index,class,residual,tq_residual,roots,lambda,q\n";
  for (const auto& s : report.sides) {
    for (const auto& l : s.lines) {
      os << s.name << "," << s.branch << "," << l.eigen_index << "," << to_string(l.rapidities.cls) << ","
         << format_double(l.rapidities.residual) << "," << format_double(l.tq_residual) << ","
         << csv_complex_list(l.rapidities.roots) << "," << csv_complex_list(l.lambda.coeffs()) << ","
         << csv_complex_list(l.q.coeffs()) << "\n";
    }
  }
  return os.str();
}

std::string render(const SpectrumReport& report, Format format) {
  return format == Format::kJson ? to_json(report).dump(2) + "\n" : to_csv(report);
}

json error_record(const Error& e) {
  return {{"error", {{"module", e.module()}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}};
}

json error_record(const std::exception& e) {
  return {{"error", {{"module", "unknown"}, {"kind", "internal"}, {"message", e.what()}}}};
}

}  // namespace fcs
