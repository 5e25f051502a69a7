#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "fcs/config.hpp"
#include "fcs/formfactor.hpp"
#include "fcs/report.hpp"
#include "fcs/verify.hpp"
#include "support.hpp"

using namespace fcs;
using namespace fcs::testing;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) { return std::string(FCS_FIXTURE_DIR) + "/" + name; }

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "run.yaml").validate();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    return e.what();
  }
  return {};
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

TEST_CASE("complex and ell tokens") {
  CHECK(parse_complex("1.5") == Complex(1.5, 0.0));
  CHECK(parse_complex("2i") == Complex(0.0, 2.0));
  CHECK(parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(parse_complex("1-0.5i") == Complex(1.0, -0.5));
  CHECK(parse_complex("-2e-1+3i") == Complex(-0.2, 3.0));
  CHECK_THROWS_AS(parse_complex("1+x"), Error);
  CHECK_THROWS_AS(parse_complex(""), Error);
  const auto list = parse_complex_list("1,0,-i", 3, "--beta");
  CHECK(list[2] == Complex(0.0, -1.0));
  CHECK_THROWS_AS(parse_complex_list("1,0", 3, "--beta"), Error);
  CHECK(parse_ell_spec("2..5", "--ell") == std::vector<int>{2, 3, 4, 5});
  CHECK(parse_ell_spec("0,3,1", "--ell") == std::vector<int>{0, 3, 1});
  CHECK_THROWS_AS(parse_ell_spec("5..2", "--ell"), Error);
  CHECK(parse_mode("oracle", "--mode") == Mode::kOracle);
  CHECK(parse_branch("both", "--branch") == BranchChoice::kBoth);
  CHECK(parse_format("json", "--format") == Format::kJson);
  CHECK_THROWS_AS(parse_format("xml", "--format"), Error);
}

TEST_CASE("a full configuration parses") {
  const RunConfig cfg = parse_config(
      "chain:\n"
      "  length: 6\n"
      "  c: [1, 0]\n"
      "twist:\n"
      "  k1: [0.5, 0]\n"
      "  k2: [0, 1]\n"
      "  kp: 1\n"
      "  km: [2, -1]\n"
      "beta: [[1, 0], [0, 0], [0.5, 0.25]]\n"
      "ell: \"1..3\"\n"
      "state: 2\n"
      "branch: both\n"
      "mode: verify\n"
      "output:\n"
      "  format: json\n"
      "  path: out.json\n"
      "tolerances:\n"
      "  fcs: 1e-7\n",
      "run.yaml");
  cfg.validate();
  CHECK(cfg.chain.length == 6);
  CHECK(cfg.twist.k2 == Complex(0.0, 1.0));
  CHECK(cfg.twist.km == Complex(2.0, -1.0));
  CHECK(cfg.beta[2] == Complex(0.5, 0.25));
  CHECK(cfg.ell_list() == std::vector<int>{1, 2, 3});
  CHECK(cfg.state == 2);
  CHECK(cfg.branch == BranchChoice::kBoth);
  CHECK(cfg.mode == Mode::kVerify);
  CHECK(cfg.format == Format::kJson);
  CHECK(cfg.out == "out.json");
  CHECK(cfg.tolerances.fcs == 1e-7);
  CHECK(cfg.origin.at("chain.length") == "run.yaml:2");

  const RunConfig preset = parse_config("twist: sigma_y\n", "p.yaml");
  CHECK(preset.twist.kp == Complex(0.0, -1.0));
  CHECK(preset.ell_list().size() == 5);
}

TEST_CASE("invalid fields are rejected with key and line") {
  CHECK(config_error("chain:\n  length: 5\n").find("'chain.length' at run.yaml:2") != std::string::npos);
  CHECK(config_error("chain:\n  length: 4\nseed: 1\n").find("unknown key 'seed' at run.yaml:3") != std::string::npos);
  CHECK(config_error("mode: fast\n").find("'mode' at run.yaml:1") != std::string::npos);
  CHECK(config_error("tolerances:\n  fcs: -1\n").find("'tolerances.fcs' at run.yaml:2") != std::string::npos);
  CHECK(config_error("tolerances:\n  speed: 1\n").find("tolerances.speed") != std::string::npos);
  CHECK(config_error("state: 99\n").find("'state'") != std::string::npos);
  CHECK(config_error("twist:\n  k1: 1\n  k2: 1\n  kp: 1\n").find("twist") != std::string::npos);
  CHECK(config_error("mode: oracle\nbranch: both\n").find("branch") != std::string::npos);
  CHECK(config_error("chain: [\n").find("run.yaml") != std::string::npos);

  for (const char* name : {"bad_length.yaml", "unknown_key.yaml", "bad_complex.yaml", "bad_mode.yaml",
                           "bad_twist_entry.yaml", "bad_ell.yaml"}) {
    const std::string path = fixture(name);
    CAPTURE(path);
    bool raised = false;
    try {
      load_config(path).validate();
    } catch (const Error& e) {
      raised = true;
      CHECK(std::string(e.what()).find(path + ":") != std::string::npos);
      CHECK(error_record(e)["error"]["module"] == "fcs_cli");
      CHECK(error_record(e)["error"]["kind"] == "config");
    }
    CHECK(raised);
  }
  CHECK_THROWS_AS(load_config(fixture("missing.yaml")), Error);
}

TEST_CASE("tolerance table") {
  Tolerances t;
  for (const auto& name : tolerance_names()) {
    tolerance_ref(t, name) = 0.125;
    CHECK(tolerance_ref(t, name) == 0.125);
  }
  CHECK_THROWS_AS(tolerance_ref(t, "speed"), Error);
  const Tolerances d;
  CHECK(d.fcs_for(6) == 1e-8);
  CHECK(d.fcs_for(8) == 1e-6);
  const RunConfig tampered = load_config(fixture("tampered_tolerance.yaml"));
  CHECK(tampered.tolerances.fcs == 1e-20);
}

TEST_CASE("oracle mode bypasses the Bethe pipeline") {
  RunConfig cfg;
  cfg.chain.length = 4;
  cfg.mode = Mode::kOracle;
  const FcsReport rep = run_fcs(cfg);
  REQUIRE(rep.tables.size() == 1);
  CHECK(!rep.tables[0].branch.has_value());
  CHECK(rep.tables[0].lines == 0);
  const std::vector<int> ells{0, 1, 2, 3, 4};
  const auto direct = fcs_oracle(cfg.twist, cfg.beta, ells, cfg.chain, 0);
  for (std::size_t e = 0; e < ells.size(); ++e) CHECK(rep.tables[0].rows[e].value == direct[e]);
}

TEST_CASE("verify mode with both branches") {
  RunConfig cfg;
  cfg.chain.length = 4;
  cfg.twist = Twist::sigma_y();
  cfg.beta = {1.0, 1.0, 1.0};
  cfg.mode = Mode::kVerify;
  cfg.branch = BranchChoice::kBoth;
  const FcsReport rep = run_fcs(cfg);
  REQUIRE(rep.tables.size() == 2);
  REQUIRE(rep.max_branch_deviation.has_value());
  CHECK(*rep.max_branch_deviation <= 1e-9);
  CHECK(rep.passed());
  const std::string csv = to_csv(rep);
  CHECK(csv.find("# branch 0") != std::string::npos);
  CHECK(csv.find("# branch 1") != std::string::npos);
  CHECK(csv.find("# max_branch_deviation,") != std::string::npos);

  cfg.tolerances.fcs = 1e-20;
  CHECK(!run_fcs(cfg).passed());
}

TEST_CASE("CSV and JSON carry identical values and are deterministic") {
  RunConfig cfg;
  cfg.chain.length = 4;
  cfg.mode = Mode::kVerify;
  const FcsReport a = run_fcs(cfg);
  const FcsReport b = run_fcs(cfg);
  const std::string csv = render(a, Format::kCsv);
  CHECK(csv == render(b, Format::kCsv));
  CHECK(render(a, Format::kJson) == render(b, Format::kJson));
  const auto lines = split(csv, '\n');
  REQUIRE(lines.size() >= 6);
  CHECK(lines[0] == "ell,re,im,oracle_re,oracle_im,abs_err,rel_err");
  const json j = json::parse(render(a, Format::kJson));
  const auto& rows = j["tables"][0]["rows"];
  REQUIRE(rows.size() == 5);
  for (std::size_t r = 0; r < 5; ++r) {
    const auto f = split(lines[r + 1], ',');
    REQUIRE(f.size() == 7);
    CHECK(std::stoi(f[0]) == rows[r]["ell"].get<int>());
    CHECK(same_bits(std::strtod(f[1].c_str(), nullptr), rows[r]["value"][0].get<double>()));
    CHECK(same_bits(std::strtod(f[2].c_str(), nullptr), rows[r]["value"][1].get<double>()));
    CHECK(same_bits(std::strtod(f[3].c_str(), nullptr), rows[r]["oracle"][0].get<double>()));
    CHECK(same_bits(std::strtod(f[6].c_str(), nullptr), rows[r]["rel_err"].get<double>()));
  }
}

TEST_CASE("spectrum JSON round trip is bit-exact") {
  RunConfig cfg;
  cfg.chain.length = 4;
  cfg.beta = {1.0, -1.0, 2.0};
  cfg.twist = Twist::sigma_y();
  cfg.branch = BranchChoice::kBoth;
  const SpectrumReport rep = run_spectrum(cfg);
  REQUIRE(rep.sides.size() == 4);
  const std::string text = to_json(rep).dump();
  const json back = json::parse(text);
  CHECK(back.dump() == text);
  for (std::size_t s = 0; s < rep.sides.size(); ++s) {
    const auto& lines = rep.sides[s].lines;
    REQUIRE(back["spectra"][s]["lines"].size() == lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const SpectralLine got = line_from_json(back["spectra"][s]["lines"][i]);
      const SpectralLine& want = lines[i];
      CHECK(got.eigen_index == want.eigen_index);
      CHECK(got.rapidities.cls == want.rapidities.cls);
      CHECK(same_bits(got.rapidities.residual, want.rapidities.residual));
      CHECK(same_bits(got.tq_residual, want.tq_residual));
      REQUIRE(got.rapidities.roots.size() == want.rapidities.roots.size());
      for (std::size_t r = 0; r < got.rapidities.roots.size(); ++r) {
        CHECK(same_bits(got.rapidities.roots[r].real(), want.rapidities.roots[r].real()));
        CHECK(same_bits(got.rapidities.roots[r].imag(), want.rapidities.roots[r].imag()));
      }
      for (std::size_t c = 0; c < want.lambda.coeffs().size(); ++c) {
        CHECK(same_bits(got.lambda.coeffs()[c].real(), want.lambda.coeffs()[c].real()));
        CHECK(same_bits(got.lambda.coeffs()[c].imag(), want.lambda.coeffs()[c].imag()));
      }
      for (std::size_t c = 0; c < want.q.coeffs().size(); ++c) CHECK(got.q.coeffs()[c] == want.q.coeffs()[c]);
    }
  }
  CHECK(render(rep, Format::kCsv).rfind("side,branch,eigen_index,class,residual,tq_residual,roots,lambda,q\n", 0) == 0);
}

TEST_CASE("number formatting") {
  for (int i = 0; i < 200; ++i) {
    const double x = uniform(-1.0, 1.0) * std::pow(10.0, uniform(-30.0, 30.0));
    CHECK(same_bits(std::strtod(format_double(x).c_str(), nullptr), x));
  }
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(0.5) == "0.5");
  CHECK(complex_json(Complex(std::nan(""), 1.0))[0].is_null());
  CHECK(complex_from_json(complex_json(Complex(0.1, -0.3))) == Complex(0.1, -0.3));
}

TEST_CASE("verify report at the default size") {
  RunConfig cfg;
  cfg.mode = Mode::kVerify;
  const VerifyReport rep = run_verify(cfg);
  CHECK(rep.passed());
  CHECK(std::abs(rep.alpha - 0.5) <= 1e-9);
  CHECK(std::abs(rep.delta - 4.0) <= 1e-9);
  for (const char* group : {"fcs", "sum_rule", "completeness", "branch", "bethe", "overlap", "term", "jacobian",
                            "operators", "hamiltonian"}) {
    bool seen = false;
    for (const auto& c : rep.checks) seen = seen || c.group == group;
    CAPTURE(group);
    CHECK(seen);
  }
  const std::string csv = to_csv(rep);
  CHECK(csv.rfind("group,check,measured,tolerance,status,note\n", 0) == 0);
  CHECK(csv.find("# overall,pass") != std::string::npos);
  CHECK(to_json(rep)["passed"] == true);

  cfg.tolerances.resolution = 1e-30;
  const VerifyReport strict = run_verify(cfg);
  CHECK(!strict.passed());
}
