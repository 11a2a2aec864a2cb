#include "satolab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "satolab/chebyshev.hpp"
#include "satolab/error.hpp"
#include "satolab/json_out.hpp"
#include "satolab/measures.hpp"
#include "satolab/moments_engine.hpp"
#include "satolab/number_field.hpp"
#include "satolab/selberg.hpp"

namespace satolab::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
namespace nf = number_field;

namespace {

// ---- JSON field access -------------------------------------------------------

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

double get_double(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v.get<std::string>(), &used);
      if (used == v.get<std::string>().size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key + ": expected a number");
}

std::int64_t get_int(const json& j, const std::string& key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const double d = get_double(j, key, 0.0);
  if (!std::isfinite(d) || d != std::floor(d) || std::abs(d) > 9.0e15) {
    throw ConfigError(key + ": expected an integer");
  }
  return static_cast<std::int64_t>(d);
}

std::uint64_t get_seed(const json& j, const std::string& key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (!s.empty() && s.size() <= 20 && s.find_first_not_of("0123456789") == std::string::npos) {
      try {
        return std::stoull(s);
      } catch (const std::exception&) {
      }
    }
  }
  throw ConfigError(key + ": expected a non-negative decimal 64-bit integer");
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(key + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(key + ": expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_doubles(const json& j, const std::string& key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(key + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ArcInterval get_interval(const json& j, const std::string& key, const ArcInterval& fallback,
                         bool degrees) {
  if (!j.contains(key)) return fallback;
  const auto v = get_doubles(j, key, {});
  if (v.size() != 2) throw ConfigError(key + ": expected [a, b]");
  const double s = degrees ? kPi / 180.0 : 1.0;
  try {
    return ArcInterval(v[0] * s, v[1] * s);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

nf::FieldSpec parse_field(const json& v) {
  if (v.is_string()) return nf::FieldSpec::parse(v.get<std::string>());
  check_keys(v, {"kind", "D", "degree"}, "field");
  if (v.contains("degree")) {
    const auto d = get_int(v, "degree", 0);
    if (d >= 3) nf::FieldSpec::of_degree(static_cast<int>(d));
  }
  const std::string kind = get_string(v, "kind", "");
  if (kind == "rationals" || kind == "Q") return nf::FieldSpec::rationals();
  if (kind == "real_quadratic") return nf::FieldSpec::real_quadratic(get_int(v, "D", 0));
  throw ConfigError("field.kind: expected 'rationals' or 'real_quadratic', got '" + kind + "'");
}

json field_to_json(const nf::FieldSpec& f) {
  if (f.kind == nf::FieldKind::rationals) return {{"kind", "rationals"}};
  return {{"kind", "real_quadratic"}, {"D", f.D}};
}

nf::LevelSpec parse_level(const json& v, const nf::FieldSpec& field) {
  nf::LevelSpec level;
  const json* list = &v;
  if (v.is_object()) {
    check_keys(v, {"excluded", "squarefree"}, "level");
    level.squarefree = get_bool(v, "squarefree", true);
    if (!v.contains("excluded")) return level;
    list = &v.at("excluded");
  }
  if (!list->is_array()) throw ConfigError("level: expected a list of {p, label}");
  for (const auto& e : *list) {
    check_keys(e, {"p", "label"}, "level entry");
    const auto p = get_int(e, "p", 0);
    const auto label = get_int(e, "label", 0);
    if (p < 2) throw ConfigError("level.p: expected a prime");
    std::vector<nf::PrimeIdeal> above;
    try {
      above = nf::split_prime(field, static_cast<std::uint64_t>(p));
    } catch (const ConfigError& err) {
      throw ConfigError(std::string("level.p: ") + err.what());
    }
    bool found = false;
    for (const auto& P : above) {
      if (P.label == label) {
        level.excluded.push_back(P);
        found = true;
      }
    }
    if (!found) throw ConfigError("level.label: no ideal with that label above " + std::to_string(p));
  }
  level.validate();
  return level;
}

json level_to_json(const nf::LevelSpec& level) {
  json ex = json::array();
  for (const auto& P : level.excluded) ex.push_back({{"p", P.p}, {"label", P.label}});
  return {{"excluded", ex}, {"squarefree", level.squarefree}};
}

ensemble::SmoothSpec parse_smooth(const json& v) {
  check_keys(v, {"kind", "lambda", "omega", "table"}, "smooth");
  ensemble::SmoothSpec s;
  const std::string kind = get_string(v, "kind", "gaussian");
  if (kind == "gaussian") {
    s.kind = ensemble::SmoothSpec::Kind::gaussian;
    s.lambda = get_double(v, "lambda", 1.0);
  } else if (kind == "custom") {
    s.kind = ensemble::SmoothSpec::Kind::custom;
    if (!v.contains("table")) throw ConfigError("smooth.table: required for kind 'custom'");
    const json& t = v.at("table");
    check_keys(t, {"u", "phi"}, "smooth.table");
    s.table_u = get_doubles(t, "u", {});
    s.table_phi = get_doubles(t, "phi", {});
  } else {
    throw ConfigError("smooth.kind: expected 'gaussian' or 'custom'");
  }
  s.omega = get_double(v, "omega", 2.0);
  s.validate();
  return s;
}

json smooth_to_json(const ensemble::SmoothSpec& s) {
  if (s.kind == ensemble::SmoothSpec::Kind::gaussian) {
    return {{"kind", "gaussian"}, {"lambda", s.lambda}, {"omega", s.omega}};
  }
  return {{"kind", "custom"}, {"omega", s.omega}, {"table", {{"u", s.table_u}, {"phi", s.table_phi}}}};
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  try {
    json j = json::parse(f);
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
  }
}

int threads_from(const json& j) {
  if (j.contains("threads")) return static_cast<int>(get_int(j, "threads", 0));
  if (const char* env = std::getenv("SATOLAB_THREADS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError("SATOLAB_THREADS: expected an integer");
    }
  }
  return 0;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ",";
    out += c;
    first = false;
  }
  return out + "\n";
}

std::string num(double v) { return io::format17(v); }

json complex_list(const selberg::ExtremalPair& pair, selberg::Sign sign) {
  json arr = json::array();
  for (int m = -pair.degree; m <= pair.degree; ++m) {
    const auto c = pair.s_hat(sign, m);
    arr.push_back(json::array({c.real(), c.imag()}));
  }
  return arr;
}

json series_list(const chebyshev::Series& s) {
  json arr = json::array();
  for (double c : s.coeffs()) arr.push_back(c);
  return arr;
}

// ---- Subcommands ---------------------------------------------------------------

struct Context {
  json resolved;
  fs::path out;
  std::string name;

  void echo() const { io::write_text(out / (name + "_config.json"), io::dump(resolved)); }
};

int cmd_approx(Context& ctx) {
  const json& j = ctx.resolved;
  check_keys(j, {"interval", "degrees", "M", "points", "threads"}, "approx");
  const bool degrees = get_bool(j, "degrees", false);
  if (!j.contains("interval")) throw ConfigError("interval: required");
  const ArcInterval I = get_interval(j, "interval", ArcInterval(0.0, kPi), degrees);
  const auto M = get_int(j, "M", 20);
  if (M < 3 || M > 5000) throw ConfigError("M: must lie in 3..5000");
  const auto points = get_int(j, "points", 10000);
  if (points < 2 || points > 10'000'000) throw ConfigError("points: must lie in 2..1e7");
  const int threads = threads_from(j);

  ctx.resolved = {{"interval", {I.a, I.b}}, {"degrees", false}, {"M", M}, {"points", points},
                  {"threads", threads}};
  ctx.echo();

  const auto pair = selberg::to_chebyshev(I, static_cast<int>(M), threads);
  const auto defect = selberg::mass_defect(pair);
  const double violation = selberg::max_sandwich_violation(pair, static_cast<int>(points));
  json out = {{"degree", pair.degree},
              {"interval", {I.a, I.b}},
              {"s_plus", complex_list(pair, selberg::Sign::plus)},
              {"s_minus", complex_list(pair, selberg::Sign::minus)},
              {"f_plus", series_list(pair.f_plus)},
              {"f_minus", series_list(pair.f_minus)},
              {"mass_defect", {{"plus", defect.plus}, {"minus", defect.minus}}},
              {"max_sandwich_violation", violation},
              {"truncation_residual", pair.truncation_residual},
              {"mu_infty", selberg::mu_infty_interval(I)}};
  io::write_text(ctx.out / "approx.json", io::dump(out));
  std::cout << "approx: M=" << M << " mass_defect=(" << num(defect.plus) << ", "
            << num(defect.minus) << ") max_sandwich_violation=" << num(violation) << "\n";
  if (violation > 1e-9) {
    throw ContractError("sandwich violated by " + num(violation) + " (tolerance 1e-9)");
  }
  return 0;
}

int cmd_measures(Context& ctx) {
  const json& j = ctx.resolved;
  check_keys(j, {"q", "max_m", "panels"}, "measures");
  const auto qs = get_doubles(j, "q", {4.0});
  const auto max_m = get_int(j, "max_m", 6);
  const auto panels = get_int(j, "panels", kDefaultPanels);
  if (qs.empty()) throw ConfigError("q: at least one norm required");
  if (max_m < 0 || max_m > 1000) throw ConfigError("max_m: must lie in 0..1000");
  if (panels < 2 || panels > (1 << 24)) throw ConfigError("panels: must lie in 2..2^24");
  std::vector<measures::LocalMeasure> ms;
  for (double q : qs) {
    try {
      ms.emplace_back(q);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("q: ") + e.what());
    }
  }
  ctx.resolved = {{"q", qs}, {"max_m", max_m}, {"panels", panels}};
  ctx.echo();

  std::string csv = "q,m,closed_form,quadrature,abs_err\n";
  double worst = 0.0;
  for (const auto& mu : ms) {
    for (int m = 0; m <= max_m; ++m) {
      const double closed = mu.chebyshev_moment(m);
      const double quad = simpson(
          [&](double t) { return chebyshev::eval_u(m, std::clamp(t, 0.0, kPi)) * mu.density(std::clamp(t, 0.0, kPi)); },
          0.0, kPi, static_cast<int>(panels));
      const double err = std::abs(closed - quad);
      worst = std::max(worst, err);
      csv += csv_row({num(mu.q()), std::to_string(m), num(closed), num(quad), num(err)});
    }
  }
  io::write_text(ctx.out / "measures.csv", csv);
  std::cout << "measures: " << ms.size() << " norm(s), m <= " << max_m
            << ", max abs_err=" << num(worst) << "\n";
  return 0;
}

int cmd_primes(Context& ctx) {
  const json& j = ctx.resolved;
  check_keys(j, {"field", "x", "level"}, "primes");
  const nf::FieldSpec field = j.contains("field") ? parse_field(j.at("field")) : nf::FieldSpec::real_quadratic(5);
  const double x = get_double(j, "x", 1e6);
  if (!(x >= 2.0) || x > 1e8) throw ConfigError("x: must lie in [2, 1e8]");
  const nf::LevelSpec level = j.contains("level") ? parse_level(j.at("level"), field) : nf::LevelSpec{};
  ctx.resolved = {{"field", field_to_json(field)}, {"x", x}, {"level", level_to_json(level)}};
  ctx.echo();

  const auto ideals = nf::enumerate_prime_ideals(field, x, level);
  std::string csv = "p,f,norm,type\n";
  for (const auto& P : ideals) {
    csv += csv_row({std::to_string(P.p), std::to_string(P.f), std::to_string(P.norm), nf::to_string(P.type)});
  }
  io::write_text(ctx.out / "primes.csv", csv);
  const double mertens = nf::mertens_sum(ideals);
  const double loglog = std::log(std::log(x));
  json summary = {{"field", field.name()},
                  {"x", x},
                  {"pi_L", ideals.size()},
                  {"mertens", mertens},
                  {"mertens_minus_loglog", x > std::exp(1.0) ? json(mertens - loglog) : json(nullptr)},
                  {"higher_power_sum", nf::higher_power_sum(ideals)}};
  io::write_text(ctx.out / "primes_summary.json", io::dump(summary));
  std::cout << "primes: field=" << field.name() << " x=" << num(x) << " pi_L=" << ideals.size()
            << " mertens=" << num(mertens) << "\n";
  return 0;
}

int cmd_clt(Context& ctx) {
  json& j = ctx.resolved;
  const int threads = threads_from(j);
  json cfg_json = j;
  cfg_json.erase("threads");
  const auto cfg = ensemble_config_from_json(cfg_json);
  ctx.resolved = ensemble_config_to_json(cfg);
  ctx.resolved["threads"] = threads;
  ctx.echo();

  const auto rep = ensemble::run_ensemble(cfg, threads);
  json full = {{"config", ensemble_config_to_json(cfg)}};
  full.update(report_to_json(rep));
  io::write_text(ctx.out / "report.json", io::dump(full));
  std::string csv = "bin_left,bin_right,count\n";
  const auto& h = rep.histogram;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    csv += csv_row({num(h.edges[k]), num(h.edges[k + 1]), std::to_string(h.counts[k])});
  }
  io::write_text(ctx.out / "histogram.csv", csv);
  std::cout << "clt: H=" << rep.H << " pi_L=" << rep.pi_L_x << " ks=" << num(rep.ks_statistic)
            << " m1=" << num(rep.empirical_moments.at(0)) << "\n";
  return 0;
}

int cmd_theory(Context& ctx) {
  const json& j = ctx.resolved;
  check_keys(j, {"n", "x", "interval", "degrees", "field", "M", "sign", "k", "log_k", "threads"},
             "theory");
  const auto n = get_int(j, "n", 4);
  if (n < 1 || n > 8) throw ConfigError("n: must lie in 1..8");
  const double x = get_double(j, "x", 1e6);
  if (!(x >= 16.0) || x > 1e8) throw ConfigError("x: must lie in [16, 1e8]");
  const bool degrees = get_bool(j, "degrees", false);
  const ArcInterval I = get_interval(j, "interval", ArcInterval(kPi / 4.0, kPi / 2.0), degrees);
  const nf::FieldSpec field = j.contains("field") ? parse_field(j.at("field")) : nf::FieldSpec::real_quadratic(5);
  const std::string sign_name = get_string(j, "sign", "plus");
  if (sign_name != "plus" && sign_name != "minus") throw ConfigError("sign: expected 'plus' or 'minus'");
  const auto sign = sign_name == "plus" ? selberg::Sign::plus : selberg::Sign::minus;
  moments::WeightVector k;
  if (j.contains("log_k")) {
    k = moments::WeightVector::from_logs(get_doubles(j, "log_k", {}));
  } else {
    std::vector<std::int64_t> ks;
    for (double v : get_doubles(j, "k", {4.0, 4.0})) {
      if (v != std::floor(v)) throw ConfigError("k: expected integers");
      ks.push_back(static_cast<std::int64_t>(v));
    }
    k = moments::WeightVector::from_integers(ks);
  }
  const int threads = threads_from(j);

  const auto ideals = nf::enumerate_prime_ideals(field, x);
  auto M = get_int(j, "M", 0);
  if (M == 0) M = moments::clt_degree(static_cast<std::int64_t>(ideals.size()), x);
  if (M < 3 || static_cast<long>(M) * n > moments::kPowerDegreeGuard) {
    throw ConfigError("M: must satisfy 3 <= M and n * M <= 10000, got M = " + std::to_string(M));
  }
  ctx.resolved = {{"n", n}, {"x", x}, {"interval", {I.a, I.b}}, {"degrees", false},
                  {"field", field_to_json(field)}, {"M", M}, {"sign", sign_name},
                  {"log_k", k.log_k}, {"threads", threads}};
  ctx.echo();

  const auto pair = selberg::to_chebyshev(I, static_cast<int>(M), threads);
  const auto rep = moments::moment_main_term(static_cast<int>(n), ideals, pair, sign);
  const auto g = moments::growth_bookkeeping(field, x, k, nf::LevelSpec{}, static_cast<int>(n));
  json out = {{"n", n},
              {"main_term", rep.main_term},
              {"gaussian_target", rep.gaussian_target},
              {"ratio", rep.ratio},
              {"variance_sum", rep.variance_sum},
              {"mu_infty", selberg::mu_infty_interval(I)},
              {"pi_L", rep.pi_L},
              {"case_breakdown", {{"case1", rep.case1}, {"case2", rep.case2}, {"case3", rep.case3}}},
              {"M_used", M},
              {"growth_report",
               {{"pi_L", g.pi_L},
                {"pi_L_estimated", g.pi_L_estimated},
                {"M_clt", g.M_clt},
                {"M_first_moment_all", g.M_first_moment_all},
                {"M_first_moment_drop_last", g.M_first_moment_drop_last},
                {"level_norm", g.level_norm},
                {"log_budget", g.log_budget},
                {"budget", g.budget},
                {"budget_ok", g.budget_ok}}}};
  io::write_text(ctx.out / "theory.json", io::dump(out));
  std::cout << "theory: n=" << n << " M=" << M << " main_term=" << num(rep.main_term)
            << " target=" << num(rep.gaussian_target) << "\n";
  return 0;
}

int cmd_smooth(Context& ctx) {
  const json& j = ctx.resolved;
  check_keys(j, {"smooth", "lambda", "M", "panels", "points"}, "smooth");
  ensemble::SmoothSpec spec = j.contains("smooth") ? parse_smooth(j.at("smooth")) : ensemble::SmoothSpec{};
  if (j.contains("lambda")) {
    spec.kind = ensemble::SmoothSpec::Kind::gaussian;
    spec.lambda = get_double(j, "lambda", 1.0);
  }
  spec.validate();
  const double M = get_double(j, "M", 4.0);
  if (!(M >= 1.0) || !std::isfinite(M)) throw ConfigError("M: must be >= 1");
  const auto panels = get_int(j, "panels", kDefaultPanels);
  const auto points = get_int(j, "points", 101);
  if (panels < 2 || panels > (1 << 24)) throw ConfigError("panels: must lie in 2..2^24");
  if (points < 2 || points > 1'000'000) throw ConfigError("points: must lie in 2..1e6");
  ctx.resolved = {{"smooth", smooth_to_json(spec)}, {"M", M}, {"panels", panels}, {"points", points}};
  ctx.echo();

  const auto st = ensemble::smooth_moments(spec, M, std::nullopt, static_cast<int>(panels));
  std::string csv = "t,phi\n";
  for (std::int64_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    csv += csv_row({num(t), num(ensemble::smooth_weight(spec, M, t))});
  }
  io::write_text(ctx.out / "smooth_weight.csv", csv);
  json out = {{"smooth", smooth_to_json(spec)}, {"M", M},
              {"mean", st.mean}, {"second", st.second}, {"V", st.variance}};
  io::write_text(ctx.out / "smooth.json", io::dump(out));
  std::cout << "smooth: M=" << num(M) << " V=" << num(st.variance) << "\n";
  return 0;
}

// ---- Flag binding -------------------------------------------------------------

// CLI values are copied into the resolved JSON only when given, so they
// override config-file entries and everything else falls back to defaults.
struct Overrides {
  std::vector<std::pair<CLI::Option*, std::function<void(json&)>>> items;
  std::deque<double> doubles;
  std::deque<std::int64_t> ints;
  std::deque<std::uint64_t> uints;
  std::deque<std::string> strings;
  std::deque<std::vector<double>> vectors;
  std::deque<std::vector<std::string>> string_lists;

  void apply(json& j) const {
    for (const auto& [opt, fn] : items) {
      if (opt->count() > 0) fn(j);
    }
  }
};

void bind_double(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                 const std::string& help) {
  double& v = ov.doubles.emplace_back();
  ov.items.emplace_back(app->add_option(flag, v, help), [&v, key](json& j) { j[key] = v; });
}

void bind_int(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
              const std::string& help) {
  std::int64_t& v = ov.ints.emplace_back();
  ov.items.emplace_back(app->add_option(flag, v, help), [&v, key](json& j) { j[key] = v; });
}

void bind_string(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                 const std::string& help) {
  std::string& v = ov.strings.emplace_back();
  ov.items.emplace_back(app->add_option(flag, v, help), [&v, key](json& j) { j[key] = v; });
}

void bind_vector(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                 const std::string& help, int expected = -1) {
  std::vector<double>& v = ov.vectors.emplace_back();
  auto* opt = app->add_option(flag, v, help);
  if (expected > 0) opt->expected(expected);
  ov.items.emplace_back(opt, [&v, key](json& j) { j[key] = v; });
}

void bind_degrees(CLI::App* app, Overrides& ov) {
  auto* opt = app->add_flag("--degrees", "interval endpoints are given in degrees");
  ov.items.emplace_back(opt, [](json& j) { j["degrees"] = true; });
}

void bind_threads(CLI::App* app, Overrides& ov) {
  bind_int(app, ov, "--threads", "threads", "worker threads (default: SATOLAB_THREADS or all)");
}

void bind_field(CLI::App* app, Overrides& ov) {
  bind_string(app, ov, "--field", "field", "Q or sqrtD, e.g. sqrt5");
}

void bind_level(CLI::App* app, Overrides& ov) {
  auto& v = ov.string_lists.emplace_back();
  auto* opt = app->add_option("--exclude", v, "exclude the ideal p[:label] (repeatable)");
  ov.items.emplace_back(opt, [&v](json& j) {
    json ex = json::array();
    for (const auto& s : v) {
      const auto colon = s.find(':');
      try {
        const std::int64_t p = std::stoll(s.substr(0, colon));
        const std::int64_t label = colon == std::string::npos ? 0 : std::stoll(s.substr(colon + 1));
        ex.push_back({{"p", p}, {"label", label}});
      } catch (const std::exception&) {
        throw ConfigError("exclude: expected p or p:label, got '" + s + "'");
      }
    }
    j["level"] = ex;
  });
}

}  // namespace

ensemble::EnsembleConfig ensemble_config_from_json(const json& j) {
  check_keys(j, {"field", "level", "x", "H", "seed", "statistic", "interval", "degrees", "smooth",
                 "smooth_M", "R"},
             "clt config");
  ensemble::EnsembleConfig cfg;
  if (j.contains("field")) cfg.field = parse_field(j.at("field"));
  if (j.contains("level")) cfg.level = parse_level(j.at("level"), cfg.field);
  cfg.x = get_double(j, "x", cfg.x);
  if (!(cfg.x >= 2.0) || cfg.x > 1e8) throw ConfigError("x: must lie in [2, 1e8]");
  cfg.H = get_int(j, "H", cfg.H);
  if (cfg.H < 1) throw ConfigError("H: must be a positive integer");
  cfg.seed = get_seed(j, "seed", cfg.seed);
  const std::string stat = get_string(j, "statistic", "indicator");
  if (stat == "indicator") {
    cfg.statistic = ensemble::StatisticKind::indicator;
  } else if (stat == "smooth") {
    cfg.statistic = ensemble::StatisticKind::smooth;
  } else {
    throw ConfigError("statistic: expected 'indicator' or 'smooth'");
  }
  cfg.interval = get_interval(j, "interval", cfg.interval, get_bool(j, "degrees", false));
  if (j.contains("smooth")) cfg.smooth = parse_smooth(j.at("smooth"));
  cfg.smooth_M = get_double(j, "smooth_M", cfg.smooth_M);
  cfg.R = static_cast<int>(get_int(j, "R", cfg.R));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("clt config: ") + e.what());
  }
  return cfg;
}

json ensemble_config_to_json(const ensemble::EnsembleConfig& cfg) {
  return {{"field", field_to_json(cfg.field)},
          {"level", level_to_json(cfg.level)},
          {"x", cfg.x},
          {"H", cfg.H},
          {"seed", cfg.seed},
          {"statistic", cfg.statistic == ensemble::StatisticKind::indicator ? "indicator" : "smooth"},
          {"interval", {cfg.interval.a, cfg.interval.b}},
          {"degrees", false},
          {"smooth", smooth_to_json(cfg.smooth)},
          {"smooth_M", cfg.smooth_M},
          {"R", cfg.R}};
}

json report_to_json(const ensemble::MomentReport& rep) {
  const auto& h = rep.histogram;
  return {{"H", rep.H},
          {"pi_L_x", rep.pi_L_x},
          {"center", rep.center},
          {"scale", rep.scale},
          {"raw_mean", rep.raw_mean},
          {"raw_variance", rep.raw_variance},
          {"mean_model", rep.mean_model},
          {"variance_model", rep.variance_model},
          {"mean_model_standardized", rep.mean_model_standardized},
          {"variance_model_standardized", rep.variance_model_standardized},
          {"empirical_moments", rep.empirical_moments},
          {"standard_errors", rep.standard_errors},
          {"gaussian_targets", rep.gaussian_targets},
          {"ks_statistic", rep.ks_statistic},
          {"histogram",
           {{"edges", h.edges}, {"counts", h.counts}, {"underflow", h.underflow}, {"overflow", h.overflow}}}};
}

int run(int argc, char** argv) {
  CLI::App app{"satolab: Sato-Tate angle statistics laboratory"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--out", out_dir, "output directory (default: current directory)");
  app.add_option("--config", config_path, "JSON file with option values; flags override it");
  app.fallthrough();

  std::map<std::string, Overrides> ov;
  std::map<std::string, std::function<int(Context&)>> handlers;

  auto* approx = app.add_subcommand("approx", "Beurling-Selberg majorant/minorant of an interval");
  bind_vector(approx, ov["approx"], "--interval", "interval", "endpoints a b in [0, pi]", 2);
  bind_int(approx, ov["approx"], "--M", "M", "polynomial degree (>= 3)");
  bind_int(approx, ov["approx"], "--points", "points", "sandwich check grid size");
  bind_degrees(approx, ov["approx"]);
  bind_threads(approx, ov["approx"]);
  handlers["approx"] = cmd_approx;

  auto* meas = app.add_subcommand("measures", "Chebyshev moments of local measures, closed form vs quadrature");
  bind_vector(meas, ov["measures"], "--q", "q", "norm(s) q >= 2");
  bind_int(meas, ov["measures"], "--max-m", "max_m", "largest Chebyshev index");
  bind_int(meas, ov["measures"], "--panels", "panels", "Simpson panels");
  handlers["measures"] = cmd_measures;

  auto* primes = app.add_subcommand("primes", "prime ideals of norm <= x and their sums");
  bind_field(primes, ov["primes"]);
  bind_double(primes, ov["primes"], "--x", "x", "norm bound");
  bind_level(primes, ov["primes"]);
  handlers["primes"] = cmd_primes;

  auto* clt = app.add_subcommand("clt", "Monte Carlo ensemble and standardized moments");
  bind_field(clt, ov["clt"]);
  bind_level(clt, ov["clt"]);
  bind_double(clt, ov["clt"], "--x", "x", "norm bound");
  bind_int(clt, ov["clt"], "--H", "H", "ensemble size");
  bind_string(clt, ov["clt"], "--seed", "seed", "64-bit seed (decimal)");
  bind_string(clt, ov["clt"], "--statistic", "statistic", "indicator or smooth");
  bind_vector(clt, ov["clt"], "--interval", "interval", "endpoints a b in [0, pi]", 2);
  bind_degrees(clt, ov["clt"]);
  bind_double(clt, ov["clt"], "--smooth-M", "smooth_M", "scale M of the smooth statistic");
  bind_int(clt, ov["clt"], "--R", "R", "highest moment");
  bind_threads(clt, ov["clt"]);
  {
    double& lambda = ov["clt"].doubles.emplace_back();
    auto* opt = clt->add_option("--lambda", lambda, "gaussian smooth weight exp(-lambda u^2)");
    ov["clt"].items.emplace_back(opt, [&lambda](json& j) {
      j["smooth"] = {{"kind", "gaussian"}, {"lambda", lambda}};
    });
  }
  handlers["clt"] = cmd_clt;

  auto* theory = app.add_subcommand("theory", "deterministic main term of the n-th moment");
  bind_int(theory, ov["theory"], "--n", "n", "moment order (1..8)");
  bind_double(theory, ov["theory"], "--x", "x", "norm bound");
  bind_vector(theory, ov["theory"], "--interval", "interval", "endpoints a b in [0, pi]", 2);
  bind_degrees(theory, ov["theory"]);
  bind_field(theory, ov["theory"]);
  bind_int(theory, ov["theory"], "--M", "M", "degree (default: floor(sqrt(pi_L) log log x))");
  bind_string(theory, ov["theory"], "--sign", "sign", "plus or minus");
  bind_vector(theory, ov["theory"], "--k", "k", "weights k_i (even, >= 4)");
  bind_vector(theory, ov["theory"], "--log-k", "log_k", "natural logs of the weights");
  bind_threads(theory, ov["theory"]);
  handlers["theory"] = cmd_theory;

  auto* smooth = app.add_subcommand("smooth", "periodized smooth weight and its Sato-Tate variance");
  bind_double(smooth, ov["smooth"], "--lambda", "lambda", "gaussian exp(-lambda u^2)");
  bind_double(smooth, ov["smooth"], "--M", "M", "scale M >= 1");
  bind_int(smooth, ov["smooth"], "--panels", "panels", "Simpson panels");
  bind_int(smooth, ov["smooth"], "--points", "points", "rows of smooth_weight.csv");
  handlers["smooth"] = cmd_smooth;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    Context ctx;
    ctx.name = name;
    ctx.out = out_dir;
    ctx.resolved = config_path.empty() ? json::object() : load_config(config_path);
    ov[name].apply(ctx.resolved);
    return handlers[name](ctx);
  } catch (const ConfigError& e) {
    std::cerr << "satolab " << name << ": configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "satolab " << name << ": numerical contract failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "satolab " << name << ": error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("satolab");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace satolab::cli
