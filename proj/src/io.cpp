#include "pmm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pmm/errors.hpp"

namespace pmm {

using nlohmann::json;

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Simulate: return "simulate";
    case Mode::Solve: return "solve";
    case Mode::Stationary: return "stationary";
    case Mode::Compare: return "compare";
    case Mode::Diagnose: return "diagnose";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::Simulate, Mode::Solve, Mode::Stationary, Mode::Compare, Mode::Diagnose})
    if (name == to_string(m)) return m;
  throw UsageError("mode", "unknown mode '" + name + "'");
}

BoundaryCondition regime_bc(const ModelParams& params, std::optional<double> kappa) {
  if (kappa) return BoundaryCondition::robin(*kappa, params.alpha, params.beta);
  if (params.theta < 1.0) return BoundaryCondition::dirichlet(params.alpha, params.beta);
  if (params.theta == 1.0) return BoundaryCondition::robin(params.m, params.alpha, params.beta);
  return BoundaryCondition::neumann(params.alpha, params.beta);
}

BoundaryCondition RunConfig::bc() const { return regime_bc(model, kappa); }

std::vector<double> RunConfig::times() const {
  return sample_times.empty() ? uniform_times(T, sample_count) : sample_times;
}

int RunConfig::coarse_width(int n) const { return width > 0 ? width : std::max(n / 50, 1); }

std::vector<int> RunConfig::ladder() const {
  return n_ladder.empty() ? std::vector<int>{model.n} : n_ladder;
}

namespace {

// ---- scalar parsing ---------------------------------------------------------

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw UsageError(key, "expected an integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out))
    throw UsageError(key, "expected a finite number, got '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

// ---- key table --------------------------------------------------------------

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  // Canonical text, or nullopt when the key is at its "absent" state.
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

const std::vector<std::pair<std::string, Key>>& keys() {
  using Opt = std::optional<std::string>;
  static const std::vector<std::pair<std::string, Key>> table = {
      {"mode", {[](RunConfig& c, const std::string& v) { c.mode = parse_mode(v); },
                [](const RunConfig& c) -> Opt { return to_string(c.mode); }}},
      {"n", {[](RunConfig& c, const std::string& v) { c.model.n = parse_integer<int>("n", v); },
             [](const RunConfig& c) -> Opt { return std::to_string(c.model.n); }}},
      {"theta", {[](RunConfig& c, const std::string& v) { c.model.theta = parse_double("theta", v); },
                 [](const RunConfig& c) -> Opt { return fmt(c.model.theta); }}},
      {"m", {[](RunConfig& c, const std::string& v) { c.model.m = parse_double("m", v); },
             [](const RunConfig& c) -> Opt { return fmt(c.model.m); }}},
      {"a", {[](RunConfig& c, const std::string& v) { c.model.a = parse_double("a", v); },
             [](const RunConfig& c) -> Opt { return fmt(c.model.a); }}},
      {"alpha", {[](RunConfig& c, const std::string& v) { c.model.alpha = parse_double("alpha", v); },
                 [](const RunConfig& c) -> Opt { return fmt(c.model.alpha); }}},
      {"beta", {[](RunConfig& c, const std::string& v) { c.model.beta = parse_double("beta", v); },
                [](const RunConfig& c) -> Opt { return fmt(c.model.beta); }}},
      {"big_m", {[](RunConfig& c, const std::string& v) { c.model.big_m = parse_integer<int>("big_m", v); },
                 [](const RunConfig& c) -> Opt { return std::to_string(c.model.big_m); }}},
      {"kappa", {[](RunConfig& c, const std::string& v) { c.kappa = parse_double("kappa", v); },
                 [](const RunConfig& c) -> Opt { return c.kappa ? Opt(fmt(*c.kappa)) : std::nullopt; }}},
      {"J", {[](RunConfig& c, const std::string& v) { c.J = parse_integer<int>("J", v); },
             [](const RunConfig& c) -> Opt { return std::to_string(c.J); }}},
      {"T", {[](RunConfig& c, const std::string& v) { c.T = parse_double("T", v); },
             [](const RunConfig& c) -> Opt { return fmt(c.T); }}},
      {"sample_count", {[](RunConfig& c, const std::string& v) { c.sample_count = parse_integer<int>("sample_count", v); },
                        [](const RunConfig& c) -> Opt { return std::to_string(c.sample_count); }}},
      {"sample_times",
       {[](RunConfig& c, const std::string& v) {
          c.sample_times.clear();
          for (const auto& part : split(v, ',')) c.sample_times.push_back(parse_double("sample_times", part));
        },
        [](const RunConfig& c) -> Opt { return c.sample_times.empty() ? std::nullopt : Opt(join(c.sample_times)); }}},
      {"replicas", {[](RunConfig& c, const std::string& v) { c.replicas = parse_integer<int>("replicas", v); },
                    [](const RunConfig& c) -> Opt { return std::to_string(c.replicas); }}},
      {"seed", {[](RunConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>("seed", v); },
                [](const RunConfig& c) -> Opt { return std::to_string(c.seed); }}},
      {"replica_offset",
       {[](RunConfig& c, const std::string& v) { c.replica_offset = parse_integer<std::uint64_t>("replica_offset", v); },
        [](const RunConfig& c) -> Opt { return std::to_string(c.replica_offset); }}},
      {"width", {[](RunConfig& c, const std::string& v) { c.width = parse_integer<int>("width", v); },
                 [](const RunConfig& c) -> Opt { return std::to_string(c.width); }}},
      {"n_ladder",
       {[](RunConfig& c, const std::string& v) {
          c.n_ladder.clear();
          for (const auto& part : split(v, ',')) c.n_ladder.push_back(parse_integer<int>("n_ladder", part));
        },
        [](const RunConfig& c) -> Opt { return c.n_ladder.empty() ? std::nullopt : Opt(join(c.n_ladder)); }}},
      {"initial", {[](RunConfig& c, const std::string& v) { c.initial = v; },
                   [](const RunConfig& c) -> Opt { return c.initial; }}},
      {"average_from", {[](RunConfig& c, const std::string& v) { c.average_from = parse_double("average_from", v); },
                        [](const RunConfig& c) -> Opt { return c.average_from ? Opt(fmt(*c.average_from)) : std::nullopt; }}},
      {"dynamics",
       {[](RunConfig& c, const std::string& v) {
          if (v == "full")
            c.dynamics = Dynamics::Full;
          else if (v == "pure")
            c.dynamics = Dynamics::PurePorous;
          else
            throw UsageError("dynamics", "expected 'full' or 'pure', got '" + v + "'");
        },
        [](const RunConfig& c) -> Opt { return c.dynamics == Dynamics::Full ? "full" : "pure"; }}},
      {"threads", {[](RunConfig& c, const std::string& v) { c.threads = parse_integer<int>("threads", v); },
                   [](const RunConfig& c) -> Opt { return std::to_string(c.threads); }}},
      {"configuration", {[](RunConfig& c, const std::string& v) { c.configuration = v; },
                         [](const RunConfig& c) -> Opt { return c.configuration.empty() ? std::nullopt : Opt(c.configuration); }}},
      {"source", {[](RunConfig& c, const std::string& v) { c.source = parse_integer<int>("source", v); },
                  [](const RunConfig& c) -> Opt { return std::to_string(c.source); }}},
      {"target", {[](RunConfig& c, const std::string& v) { c.target = parse_integer<int>("target", v); },
                  [](const RunConfig& c) -> Opt { return std::to_string(c.target); }}},
      {"window_x", {[](RunConfig& c, const std::string& v) { c.window_x = parse_integer<int>("window_x", v); },
                    [](const RunConfig& c) -> Opt { return std::to_string(c.window_x); }}},
      {"window_ell", {[](RunConfig& c, const std::string& v) { c.window_ell = parse_integer<int>("window_ell", v); },
                      [](const RunConfig& c) -> Opt { return std::to_string(c.window_ell); }}},
      {"window_side",
       {[](RunConfig& c, const std::string& v) {
          if (v == "left")
            c.window_side = BoxSide::Left;
          else if (v == "right")
            c.window_side = BoxSide::Right;
          else
            throw UsageError("window_side", "expected 'left' or 'right', got '" + v + "'");
        },
        [](const RunConfig& c) -> Opt { return c.window_side == BoxSide::Left ? "left" : "right"; }}},
      {"out", {[](RunConfig& c, const std::string& v) { c.out = v; },
               [](const RunConfig& c) -> Opt { return c.out; }}},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  const ModelParams& p = model;
  if (p.n < 4) throw UsageError("n", "must be >= 4");
  if (!(p.theta >= 0.0)) throw UsageError("theta", "must be >= 0");
  if (!(p.m > 0.0)) throw UsageError("m", "must be > 0");
  if (!(p.a > 1.0 && p.a < 2.0)) throw UsageError("a", "must lie in (1,2)");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw UsageError("alpha", "must lie in (0,1)");
  if (!(p.beta > 0.0 && p.beta < 1.0)) throw UsageError("beta", "must lie in (0,1)");
  if (p.big_m != 2 && p.big_m != 3) throw UsageError("big_m", "must be 2 or 3");
  if (kappa && !(*kappa >= 0.0)) throw UsageError("kappa", "must be >= 0");
  if (J < 2) throw UsageError("J", "must be >= 2");
  if (!(T > 0.0)) throw UsageError("T", "must be > 0");
  if (sample_count < 1) throw UsageError("sample_count", "must be >= 1");
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_times[k] < 0.0 || sample_times[k] > T)
      throw UsageError("sample_times", "values must lie in [0, T]");
    if (k > 0 && !(sample_times[k] > sample_times[k - 1]))
      throw UsageError("sample_times", "must be strictly increasing");
  }
  if (replicas < 1) throw UsageError("replicas", "must be >= 1");
  if (width < 0) throw UsageError("width", "must be >= 0 (0 selects the default)");
  for (int n : n_ladder)
    if (n < 4) throw UsageError("n_ladder", "every size must be >= 4");
  for (int n : ladder())
    if (coarse_width(n) > n - 1) throw UsageError("width", "wider than the lattice");
  const double horizon = times().back();
  if (average_from && !(*average_from >= 0.0 && *average_from < horizon))
    throw UsageError("average_from", "must lie in [0, last sample time)");
  if (threads < 0) throw UsageError("threads", "must be >= 0");
  for (char ch : configuration)
    if (ch != '0' && ch != '1') throw UsageError("configuration", "only '0' and '1' allowed");
  if (!configuration.empty() && static_cast<int>(configuration.size()) != p.n - 1)
    throw UsageError("configuration", "needs exactly n-1 = " + std::to_string(p.n - 1) + " sites");
  if (out.empty() || std::any_of(out.begin(), out.end(), [](unsigned char ch) { return std::isspace(ch); }))
    throw UsageError("out", "must be a non-empty path without whitespace");
  try {
    parse_profile(initial, bc());
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("initial", e.what());
  }
  if (mode == Mode::Diagnose && (source != 0 || target != 0)) {
    if (source < 1 || source > p.n - 1) throw UsageError("source", "must be a bulk site");
    if (target < 1 || target > p.n - 1) throw UsageError("target", "must be a bulk site");
    if (window_ell < 1) throw UsageError("window_ell", "must be >= 1 when a transfer is requested");
    const BoxSpec box{window_x, window_ell, window_side};
    if (box.first() < 1 || box.last() > p.n - 1) throw UsageError("window_x", "window leaves the bulk");
    if (p.big_m != 2) throw UsageError("big_m", "transfer plans are built for M = 2");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, bool> seen;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0)
        throw UsageError(token, "expected key=value");
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      const auto& table = keys();
      const auto it = std::find_if(table.begin(), table.end(), [&](const auto& kv) { return kv.first == key; });
      if (it == table.end()) throw UsageError(key, "unknown key");
      if (seen[key]) throw UsageError(key, "given more than once");
      seen[key] = true;
      it->second.set(c, value);
    }
  }
  c.validate();
  return c;
}

std::string emit_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, k] : keys())
    if (const auto v = k.get(config)) out += key + "=" + *v + "\n";
  return out;
}

ProfileFn parse_profile(const std::string& spec, const BoundaryCondition& bc) {
  const auto parts = split(spec, ':');
  const std::string& kind = parts[0];
  auto arg = [&](std::size_t i) { return parse_double("initial", parts[i]); };
  auto want = [&](std::size_t count) {
    if (parts.size() != count + 1)
      throw UsageError("initial", "'" + kind + "' takes " + std::to_string(count) + " parameter(s)");
  };
  ProfileFn g;
  if (kind == "const") {
    want(1);
    const double c = arg(1);
    g = [c](double) { return c; };
  } else if (kind == "linear") {
    want(2);
    const double a = arg(1), b = arg(2);
    g = [a, b](double u) { return a + (b - a) * u; };
  } else if (kind == "step") {
    want(3);
    const double u0 = arg(1), a = arg(2), b = arg(3);
    g = [u0, a, b](double u) { return u < u0 ? a : b; };
  } else if (kind == "sine") {
    want(2);
    const double c = arg(1), amp = arg(2);
    g = [c, amp](double u) { return c + amp * std::sin(M_PI * u); };
  } else if (kind == "stationary") {
    want(0);
    g = [bc](double u) { return stationary_profile(bc, u); };
  } else {
    throw UsageError("initial", "unknown profile '" + kind + "'");
  }
  for (int i = 0; i <= 1000; ++i) {
    const double v = g(i / 1000.0);
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("initial", "profile leaves [0,1]");
  }
  return g;
}

std::string to_json(const MovePlan& plan) {
  json moves = json::array();
  for (const Move& m : plan.moves)
    moves.push_back({{"bond", m.bond}, {"phase", to_string(m.phase)}, {"certificate", m.certificate}});
  json j = {{"source", plan.source},
            {"target", plan.target},
            {"window", {{"x", plan.window.x}, {"ell", plan.window.ell},
                        {"side", plan.window.side == BoxSide::Left ? "left" : "right"}}},
            {"helpers", {plan.helpers[0], plan.helpers[1]}},
            {"distance", plan.distance},
            {"ssep_moves", plan.ssep_moves()},
            {"pmm_moves", plan.pmm_moves()},
            {"ssep_budget", plan.ssep_budget()},
            {"pmm_budget", plan.pmm_budget()},
            {"initial", plan.initial.to_string()},
            {"final", plan.final_config.to_string()},
            {"moves", moves}};
  return j.dump(2);
}

// ---- run --------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

json params_json(const ModelParams& p) {
  return {{"n", p.n}, {"theta", p.theta}, {"m", p.m}, {"a", p.a},
          {"alpha", p.alpha}, {"beta", p.beta}, {"big_m", p.big_m}};
}

// Keys that decide the results; out and threads only say where and how fast.
std::string result_keys(const RunConfig& c) {
  std::string kept;
  std::istringstream lines(emit_config(c));
  for (std::string line; std::getline(lines, line);)
    if (line.rfind("out=", 0) != 0 && line.rfind("threads=", 0) != 0) kept += line + "\n";
  return kept;
}

json provenance(const RunConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"params", params_json(c.model)},
          {"bc", c.bc().describe()},
          {"kappa_override", c.kappa.has_value()},
          {"seed", c.seed},
          {"replicas", c.replicas},
          {"replica_offset", c.replica_offset},
          {"rng", "xoshiro256** seeded by splitmix64(seed, stream)"},
          {"config", result_keys(c)}};
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& schema, const std::string& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_.precision(12);
    out_ << "# schema: " << schema << "\n" << header << "\n";
  }
  std::ofstream& row() { return out_; }

 private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

double dynkin_test(double u) { return u * (1.0 - u); }

void run_simulate(const RunConfig& c, const fs::path& dir) {
  const ModelParams& p = c.model;
  const ProfileFn g = parse_profile(c.initial, c.bc());
  ObserverSpec spec;
  spec.sample_times = c.times();
  spec.box_widths = {c.coarse_width(p.n)};
  spec.dynkin = {dynkin_test};
  std::vector<ObservationRecord> recs(static_cast<std::size_t>(c.replicas));
  for_each_replica(recs.size(), [&](std::size_t r) {
    recs[r] = simulate(p, g, spec, c.seed, c.replica_offset + r, c.dynamics);
  }, static_cast<unsigned>(c.threads));

  CsvFile csv(dir / "simulate.csv", "pmm-simulate/1", "replica,t,observable,index,u,value");
  auto& o = csv.row();
  const int w = spec.box_widths.front();
  json reps = json::array();
  for (const auto& rec : recs) {
    const auto dk = rec.dynkin(0);
    for (const Sample& s : rec.samples) {
      auto scalar = [&](const char* name, double v) {
        o << rec.replica << ',' << s.time << ',' << name << ",0,," << v << '\n';
      };
      scalar("particles", s.particles);
      scalar("left_occ", s.left_occ);
      scalar("right_occ", s.right_occ);
      scalar("flips_left_in", static_cast<double>(s.flips.left_in));
      scalar("flips_left_out", static_cast<double>(s.flips.left_out));
      scalar("flips_right_in", static_cast<double>(s.flips.right_in));
      scalar("flips_right_out", static_cast<double>(s.flips.right_out));
      scalar("left_current", s.left_current);
      scalar("right_current", s.right_current);
      scalar("dynkin_pairing", s.pairing.front());
      scalar("dynkin_martingale", dynkin_residual(dk, s.time));
      for (std::size_t k = 0; k < s.boxes.front().size(); ++k)
        o << rec.replica << ',' << s.time << ",box," << k << ','
          << coarse_center(p.n, w, static_cast<int>(k)) << ',' << s.boxes.front()[k] << '\n';
      for (std::size_t x = 0; x < s.profile.size(); ++x)
        o << rec.replica << ',' << s.time << ",site," << x + 1 << ','
          << static_cast<double>(x + 1) / p.n << ',' << int(s.profile[x]) << '\n';
    }
    reps.push_back({{"replica", rec.replica}, {"events", rec.events}, {"absorbed", rec.absorbed},
                    {"absorbed_time", rec.absorbed_time},
                    {"final_particles", rec.samples.back().particles}});
  }
  json doc = {{"provenance", provenance(c)}, {"coarse_width", w},
              {"dynkin_test_function", "u(1-u)"}, {"replicas", reps}};
  write_text(dir / "simulate.json", doc.dump(2) + "\n");
}

void run_solve(const RunConfig& c, const fs::path& dir) {
  const BoundaryCondition bc = c.bc();
  const Field f = solve(parse_profile(c.initial, bc), bc, c.T, c.J, c.times());
  CsvFile csv(dir / "field.csv", "pmm-field/1", "t,u,rho");
  for (const auto& grid : f.samples)
    for (int i = 0; i <= grid.J(); ++i)
      csv.row() << grid.time << ',' << grid.node(i) << ',' << grid.values[static_cast<std::size_t>(i)] << '\n';
  json masses = json::array();
  for (const auto& grid : f.samples) masses.push_back({{"t", grid.time}, {"mass", grid.mass()}});
  json doc = {{"provenance", provenance(c)}, {"J", c.J}, {"dt", f.dt}, {"mass", masses}};
  write_text(dir / "solve.json", doc.dump(2) + "\n");
}

void run_stationary(const RunConfig& c, const fs::path& dir) {
  const BoundaryCondition bc = c.bc();
  CsvFile csv(dir / "stationary.csv", "pmm-stationary/1", "u,rho");
  for (int i = 0; i <= c.J; ++i) {
    const double u = static_cast<double>(i) / c.J;
    csv.row() << u << ',' << stationary_profile(bc, u) << '\n';
  }
}

void run_diagnose(const RunConfig& c, const fs::path& dir) {
  const ModelParams& p = c.model;
  Configuration eta;
  if (c.configuration.empty()) {
    Rng rng(c.seed, c.replica_offset);
    eta = sample_initial(parse_profile(c.initial, c.bc()), p, rng, c.dynamics);
  } else {
    eta = Configuration::from_string(c.configuration, p.alpha, p.beta);
  }
  const Configuration pure = Configuration::from_string(eta.to_string(), 0.0, 0.0);
  json currents = json::array();
  for (int b = 0; b <= p.n - 1; ++b) currents.push_back(instantaneous_current(eta, b, p));
  json doc = {{"provenance", provenance(c)},
              {"configuration", eta.to_string()},
              {"particles", eta.particle_count()},
              {"blocked_pure_porous", detect_blocked(pure, p.big_m, Dynamics::PurePorous)},
              {"positive_transitions", transitions(eta, p, c.dynamics).size()},
              {"currents", currents}};
  if (c.source != 0 || c.target != 0) {
    const MovePlan plan = mobile_cluster_path(eta, c.source, c.target,
                                              BoxSpec{c.window_x, c.window_ell, c.window_side}, p);
    const PlanCheck check = verify_plan(plan, p);
    doc["plan"] = json::parse(to_json(plan));
    doc["plan_verified"] = check.ok;
    if (!check.ok) doc["plan_failure"] = check.failure;
  }
  write_text(dir / "diagnose.json", doc.dump(2) + "\n");
}

void run_compare(const RunConfig& c, const fs::path& dir) {
  const ComparisonReport rep = compare(c);
  CsvFile rows(dir / "compare.csv", "pmm-compare/1", "n,width,t,l1,linf,se_mean,se_max");
  CsvFile prof(dir / "compare_profiles.csv", "pmm-compare-profiles/1", "n,t,u,empirical,pde");
  CsvFile stat(dir / "compare_stationary.csv", "pmm-compare-stationary/1",
               "n,u,time_average,stationary");
  json ladder = json::array();
  for (const auto& e : rep.ladder) {
    for (std::size_t k = 0; k < e.rows.size(); ++k) {
      const auto& r = e.rows[k];
      rows.row() << e.n << ',' << e.width << ',' << r.t << ',' << r.l1 << ',' << r.linf << ','
                 << r.se_mean << ',' << r.se_max << '\n';
      for (std::size_t b = 0; b < e.centers.size(); ++b)
        prof.row() << e.n << ',' << r.t << ',' << e.centers[b] << ',' << e.empirical[k][b] << ','
                   << e.pde[k][b] << '\n';
    }
    for (std::size_t b = 0; b < e.centers.size(); ++b)
      stat.row() << e.n << ',' << e.centers[b] << ',' << e.time_average[b] << ','
                 << e.stationary[b] << '\n';
    json jr = json::array();
    for (const auto& r : e.rows)
      jr.push_back({{"t", r.t}, {"l1", r.l1}, {"linf", r.linf}, {"se_mean", r.se_mean}, {"se_max", r.se_max}});
    ladder.push_back({{"n", e.n}, {"width", e.width}, {"rows", jr}, {"mean_l1", e.mean_l1},
                      {"stationary_l1", e.stationary_l1}, {"stationary_linf", e.stationary_linf},
                      {"flux_current", e.flux_current}, {"flux_current_se", e.flux_current_se},
                      {"flux_flips", e.flux_flips}, {"events", e.events}});
  }
  json doc = {{"provenance", provenance(c)},
              {"pde", {{"J", c.J}, {"dt", rep.pde_dt}, {"bc", rep.bc.describe()}}},
              {"stationary_average_from", c.stationary_from()},
              {"ladder", ladder},
              {"l1_nonincreasing_in_n", rep.l1_nonincreasing},
              {"runtime_seconds", rep.runtime_seconds}};
  write_text(dir / "report.json", doc.dump(2) + "\n");
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  return 1;
}

}  // namespace

int report_failure(const std::string& out_dir, const std::exception& error) {
  const int code = exit_code(error);
  json doc = {{"status", "error"},
              {"exit_code", code},
              {"kind", code == 2 ? "usage" : "runtime"},
              {"message", error.what()}};
  if (const auto* u = dynamic_cast<const UsageError*>(&error)) doc["key"] = u->key();
  const std::string text = doc.dump(2) + "\n";
  std::error_code ec;
  if (!out_dir.empty() && fs::is_directory(out_dir, ec)) {
    std::ofstream f(fs::path(out_dir) / "error.json");
    f << text;
  }
  std::cerr << text;
  return code;
}

int run(const RunConfig& config) {
  try {
    config.validate();
    const fs::path dir(config.out);
    fs::create_directories(dir);
    write_text(dir / "config.txt", emit_config(config));
    switch (config.mode) {
      case Mode::Simulate: run_simulate(config, dir); break;
      case Mode::Solve: run_solve(config, dir); break;
      case Mode::Stationary: run_stationary(config, dir); break;
      case Mode::Compare: run_compare(config, dir); break;
      case Mode::Diagnose: run_diagnose(config, dir); break;
    }
    return 0;
  } catch (const std::exception& e) {
    return report_failure(config.out, e);
  }
}

}  // namespace pmm
