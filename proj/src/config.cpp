#include "fcs/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fcs/error.hpp"

namespace fcs {

namespace {

constexpr const char* kModule = "fcs_cli";

struct TolEntry {
  const char* name;
  double Tolerances::*member;
};

constexpr TolEntry kTolerances[] = {
    {"fcs", &Tolerances::fcs},
    {"sum_rule", &Tolerances::sum_rule},
    {"bethe_residual", &Tolerances::bethe_residual},
    {"tq_residual", &Tolerances::tq_residual},
    {"lambda", &Tolerances::lambda},
    {"overlap", &Tolerances::overlap},
    {"term", &Tolerances::term},
    {"jacobian", &Tolerances::jacobian},
    {"inverse", &Tolerances::inverse},
    {"commuting", &Tolerances::commuting},
    {"resolution", &Tolerances::resolution},
    {"branch", &Tolerances::branch},
    {"hamiltonian", &Tolerances::hamiltonian},
    {"affine", &Tolerances::affine},
};

[[noreturn]] void fail(const std::string& key, const std::string& where, const std::string& why) {
  std::string msg = "invalid value for '" + key + "'";
  if (!where.empty()) msg += " at " + where;
  throw Error(ErrorKind::kConfig, kModule, msg + ": " + why);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

// Complex parse without throwing; false on malformed input.
bool try_parse_complex(std::string_view token, Complex& out) {
  std::string s;
  for (char ch : token)
    if (ch != ' ' && ch != '\t') s.push_back(ch);
  if (s.empty()) return false;
  const char last = s.back();
  if (last != 'i' && last != 'j') {
    double re = 0.0;
    if (!parse_double(s, re)) return false;
    out = Complex(re, 0.0);
    return true;
  }
  s.pop_back();
  // split at the last sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  std::string re_part = split == std::string::npos ? std::string() : s.substr(0, split);
  std::string im_part = split == std::string::npos ? s : s.substr(split);
  double re = 0.0;
  double im = 0.0;
  if (!re_part.empty() && !parse_double(re_part, re)) return false;
  if (im_part.empty() || im_part == "+") {
    im = 1.0;
  } else if (im_part == "-") {
    im = -1.0;
  } else if (!parse_double(im_part, im)) {
    return false;
  }
  out = Complex(re, im);
  return true;
}

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  std::string where(const YAML::Node& n) const {
    const auto mark = n.Mark();
    if (mark.line < 0) return source_;
    return source_ + ":" + std::to_string(mark.line + 1);
  }

  void note(RunConfig& cfg, const std::string& key, const YAML::Node& n) const { cfg.origin[key] = where(n); }

  [[noreturn]] void unknown(const std::string& key, const YAML::Node& n) const {
    throw Error(ErrorKind::kConfig, kModule, "unknown key '" + key + "' at " + where(n));
  }

  std::string scalar(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(key, where(n), "expected a scalar");
    return n.Scalar();
  }

  long integer(const YAML::Node& n, const std::string& key) const {
    long v = 0;
    if (!parse_int(scalar(n, key), v)) fail(key, where(n), "expected an integer");
    return v;
  }

  double real(const YAML::Node& n, const std::string& key) const {
    double v = 0.0;
    if (!parse_double(trim(scalar(n, key)), v)) fail(key, where(n), "expected a finite number");
    return v;
  }

  // [re, im] or a single real/complex scalar
  Complex complex(const YAML::Node& n, const std::string& key) const {
    if (n.IsSequence()) {
      if (n.size() != 2) fail(key, where(n), "complex values are [re, im]");
      return {real(n[0], key), real(n[1], key)};
    }
    Complex z;
    if (!try_parse_complex(scalar(n, key), z)) fail(key, where(n), "expected a complex number [re, im]");
    return z;
  }

 private:
  std::string source_;
};

void read_chain(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsMap()) fail("chain", rd.where(node), "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = "chain." + kv.first.as<std::string>();
    rd.note(cfg, key, kv.first);
    if (key == "chain.length") {
      cfg.chain.length = static_cast<int>(rd.integer(kv.second, key));
    } else if (key == "chain.c") {
      cfg.chain.c = rd.complex(kv.second, key);
    } else {
      rd.unknown(key, kv.first);
    }
  }
}

void read_twist(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (node.IsScalar()) {
    const std::string name = node.Scalar();
    if (name == "sigma_x") {
      cfg.twist = Twist::sigma_x();
    } else if (name == "sigma_y") {
      cfg.twist = Twist::sigma_y();
    } else if (name == "identity" || name == "periodic") {
      cfg.twist = Twist::identity();
    } else {
      fail("twist", rd.where(node), "unknown preset '" + name + "' (sigma_x, sigma_y, identity)");
    }
    return;
  }
  if (!node.IsMap()) fail("twist", rd.where(node), "expected a preset name or {k1, k2, kp, km}");
  Twist t = Twist::identity();
  t.kp = t.km = 0.0;
  t.k1 = t.k2 = 0.0;
  bool seen[4] = {false, false, false, false};
  for (const auto& kv : node) {
    const std::string name = kv.first.as<std::string>();
    const std::string key = "twist." + name;
    rd.note(cfg, key, kv.first);
    Complex* slot = nullptr;
    int idx = -1;
    if (name == "k1") {
      slot = &t.k1;
      idx = 0;
    } else if (name == "k2") {
      slot = &t.k2;
      idx = 1;
    } else if (name == "kp") {
      slot = &t.kp;
      idx = 2;
    } else if (name == "km") {
      slot = &t.km;
      idx = 3;
    } else {
      rd.unknown(key, kv.first);
    }
    *slot = rd.complex(kv.second, key);
    seen[idx] = true;
  }
  const char* names[4] = {"k1", "k2", "kp", "km"};
  for (int i = 0; i < 4; ++i)
    if (!seen[i]) fail("twist." + std::string(names[i]), rd.where(node), "missing entry");
  cfg.twist = t;
}

void read_beta(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsSequence() || node.size() != 3) fail("beta", rd.where(node), "expected three complex entries");
  for (std::size_t i = 0; i < 3; ++i) cfg.beta[i] = rd.complex(node[i], "beta");
}

void read_ell(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (node.IsSequence()) {
    cfg.ells.clear();
    for (const auto& e : node) cfg.ells.push_back(static_cast<int>(rd.integer(e, "ell")));
    if (cfg.ells.empty()) fail("ell", rd.where(node), "empty list");
    return;
  }
  try {
    cfg.ells = parse_ell_spec(rd.scalar(node, "ell"), "ell");
  } catch (const Error&) {
    fail("ell", rd.where(node), "expected a..b or a list of integers");
  }
}

void read_output(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsMap()) fail("output", rd.where(node), "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = "output." + kv.first.as<std::string>();
    rd.note(cfg, key, kv.first);
    if (key == "output.format") {
      cfg.format = parse_format(rd.scalar(kv.second, key), key, rd.where(kv.second));
    } else if (key == "output.path") {
      cfg.out = rd.scalar(kv.second, key);
    } else {
      rd.unknown(key, kv.first);
    }
  }
}

void read_tolerances(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  if (!node.IsMap()) fail("tolerances", rd.where(node), "expected a mapping");
  for (const auto& kv : node) {
    const std::string name = kv.first.as<std::string>();
    const std::string key = "tolerances." + name;
    rd.note(cfg, key, kv.first);
    const auto names = tolerance_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) rd.unknown(key, kv.first);
    const double v = rd.real(kv.second, key);
    if (!(v > 0.0)) fail(key, rd.where(kv.second), "must be positive");
    tolerance_ref(cfg.tolerances, name) = v;
  }
}

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kMaba: return "maba";
    case Mode::kOracle: return "oracle";
    case Mode::kVerify: return "verify";
  }
  return "maba";
}

std::string_view to_string(Format f) { return f == Format::kJson ? "json" : "csv"; }

std::string_view to_string(BranchChoice b) {
  switch (b) {
    case BranchChoice::kFirst: return "0";
    case BranchChoice::kSecond: return "1";
    case BranchChoice::kBoth: return "both";
  }
  return "0";
}

double Tolerances::fcs_for(int length) const {
  if (fcs > 0.0) return fcs;
  return length <= 6 ? 1e-8 : 1e-6;
}

std::vector<std::string> tolerance_names() {
  std::vector<std::string> out;
  for (const auto& e : kTolerances) out.emplace_back(e.name);
  return out;
}

double& tolerance_ref(Tolerances& t, std::string_view name) {
  for (const auto& e : kTolerances)
    if (name == e.name) return t.*(e.member);
  throw Error(ErrorKind::kConfig, kModule, "unknown tolerance '" + std::string(name) + "'");
}

std::vector<int> RunConfig::ell_list() const {
  if (!ells.empty()) return ells;
  std::vector<int> out;
  for (int e = 0; e <= chain.length; ++e) out.push_back(e);
  return out;
}

void RunConfig::validate() const {
  auto where = [&](const std::string& key) {
    const auto it = origin.find(key);
    return it == origin.end() ? std::string() : it->second;
  };
  if (chain.length < 2 || chain.length > 10 || chain.length % 2 != 0) {
    fail("chain.length", where("chain.length"), "must be an even integer in [2, 10]");
  }
  if (std::abs(chain.c) == 0.0) fail("chain.c", where("chain.c"), "must be nonzero");
  if (std::abs(twist.gamma()) == 0.0) fail("twist", where("twist"), "det K must be nonzero");
  for (int e : ell_list()) {
    if (e < 0 || e > chain.length) {
      fail("ell", where("ell"), "entries must lie in [0, L] (got " + std::to_string(e) + ")");
    }
  }
  if (state >= chain.dimension()) fail("state", where("state"), "exceeds the number of states 2^L");
  if (mode == Mode::kOracle && branch == BranchChoice::kBoth) {
    fail("branch", where("branch"), "branch=both needs the Bethe pipeline (mode maba or verify)");
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::kConfig, kModule,
                "malformed YAML at " + source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  Reader rd(source);
  if (!root.IsMap()) fail("<root>", rd.where(root), "expected a mapping");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    rd.note(cfg, key, kv.first);
    const YAML::Node& v = kv.second;
    if (key == "chain") {
      read_chain(rd, v, cfg);
    } else if (key == "twist") {
      read_twist(rd, v, cfg);
    } else if (key == "beta") {
      read_beta(rd, v, cfg);
    } else if (key == "ell") {
      read_ell(rd, v, cfg);
    } else if (key == "state") {
      const long s = rd.integer(v, key);
      if (s < 0) fail(key, rd.where(v), "must be non-negative");
      cfg.state = static_cast<std::size_t>(s);
    } else if (key == "branch") {
      cfg.branch = parse_branch(rd.scalar(v, key), key, rd.where(v));
    } else if (key == "mode") {
      cfg.mode = parse_mode(rd.scalar(v, key), key, rd.where(v));
    } else if (key == "output") {
      read_output(rd, v, cfg);
    } else if (key == "tolerances") {
      read_tolerances(rd, v, cfg);
    } else {
      rd.unknown(key, kv.first);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, kModule, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Complex parse_complex(std::string_view token) {
  Complex z;
  if (!try_parse_complex(token, z)) {
    throw Error(ErrorKind::kConfig, kModule, "malformed complex number '" + std::string(token) + "'");
  }
  return z;
}

std::vector<Complex> parse_complex_list(std::string_view text, std::size_t expected, const std::string& key) {
  std::vector<Complex> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    Complex z;
    if (!try_parse_complex(piece, z)) fail(key, "", "malformed complex entry '" + std::string(piece) + "'");
    out.push_back(z);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected) {
    fail(key, "", "expected " + std::to_string(expected) + " comma-separated entries");
  }
  return out;
}

std::vector<int> parse_ell_spec(std::string_view text, const std::string& key) {
  const std::string s = trim(text);
  std::vector<int> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    long a = 0;
    long b = 0;
    if (!parse_int(s.substr(0, dots), a) || !parse_int(s.substr(dots + 2), b) || b < a) {
      fail(key, "", "expected a..b with a <= b");
    }
    for (long e = a; e <= b; ++e) out.push_back(static_cast<int>(e));
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    long v = 0;
    if (!parse_int(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start), v)) {
      fail(key, "", "expected a..b or a comma list of integers");
    }
    out.push_back(static_cast<int>(v));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Mode parse_mode(std::string_view text, const std::string& key, const std::string& where) {
  if (text == "maba") return Mode::kMaba;
  if (text == "oracle") return Mode::kOracle;
  if (text == "verify") return Mode::kVerify;
  fail(key, where, "expected maba, oracle or verify");
}

Format parse_format(std::string_view text, const std::string& key, const std::string& where) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  fail(key, where, "expected csv or json");
}

BranchChoice parse_branch(std::string_view text, const std::string& key, const std::string& where) {
  if (text == "0") return BranchChoice::kFirst;
  if (text == "1") return BranchChoice::kSecond;
  if (text == "both") return BranchChoice::kBoth;
  fail(key, where, "expected 0, 1 or both");
}

}  // namespace fcs
