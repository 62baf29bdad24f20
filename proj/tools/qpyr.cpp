// Command-line front end: realization enumeration, |EC|^2 sweeps, critical
// points, rigidity verdicts, family tracing, and face-census DOF balances.
//
// Exit codes: 0 success (an empty result is a success), 2 malformed input,
// 3 precondition failure (e.g. tracing from a rigid configuration).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpyr/dof.hpp"
#include "qpyr/geometry.hpp"
#include "qpyr/rigidity.hpp"
#include "qpyr/solver.hpp"

namespace {

using nlohmann::json;
using namespace qpyr;

std::string fmt(double v, int digits) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

std::string fmt15(double v) { return fmt(v, 15); }
std::string fmt17(double v) { return fmt(v, 17); }

// Accepts plain floating-point literals and sqrt(N) expressions.
double parse_number_token(const std::string& token) {
  std::string t = token;
  const auto strip = [](std::string& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.pop_back();
  };
  strip(t);
  bool root = false;
  if (t.size() > 6 && t.rfind("sqrt(", 0) == 0 && t.back() == ')') {
    root = true;
    t = t.substr(5, t.size() - 6);
    strip(t);
  }
  if (t.empty()) throw Error(Errc::bad_input, "empty number token");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    throw Error(Errc::bad_input, "cannot parse number '" + token + "'");
  if (root) {
    if (v < 0.0) throw Error(Errc::bad_input, "sqrt of a negative number");
    return std::sqrt(v);
  }
  return v;
}

std::vector<double> parse_number_list(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(parse_number_token(t));
  return out;
}

std::vector<double> split_and_parse(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return parse_number_list(tokens);
}

struct CommonOptions {
  std::string format = "text";
  long long seed = 0;  // reserved for batch experiments; accepted everywhere
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "random seed (reserved)")
      ->capture_default_str();
}

// Problem file: {"lengths":[... 7 or 8 numbers or "sqrt(N)" strings],
//               "options":{"grid":..,"tol":..,"congruence_tol":..,
//                          "include_degenerate":..,"seed":..}}
struct ProblemFile {
  std::vector<double> lengths;
  SolveOptions solve;
  long long seed = 0;
};

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::bad_input, "cannot open problem file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::bad_input, std::string("problem file: ") + e.what());
  }
  ProblemFile p;
  if (!j.contains("lengths") || !j["lengths"].is_array())
    throw Error(Errc::bad_input, "problem file needs a lengths array");
  for (const auto& item : j["lengths"]) {
    if (item.is_string())
      p.lengths.push_back(parse_number_token(item.get<std::string>()));
    else if (item.is_number())
      p.lengths.push_back(item.get<double>());
    else
      throw Error(Errc::bad_input, "lengths entries must be numbers or strings");
  }
  if (j.contains("options")) {
    const json& o = j["options"];
    if (o.contains("grid")) p.solve.grid = o["grid"].get<int>();
    if (o.contains("tol")) p.solve.residual_tol = o["tol"].get<double>();
    if (o.contains("congruence_tol"))
      p.solve.congruence_tol = o["congruence_tol"].get<double>();
    if (o.contains("include_degenerate"))
      p.solve.include_degenerate = o["include_degenerate"].get<bool>();
    if (o.contains("seed")) p.seed = o["seed"].get<long long>();
  }
  return p;
}

EdgeLengthSet lengths_from(const std::vector<double>& v, bool allow_seven) {
  if (v.size() == 8)
    return EdgeLengthSet({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  if (allow_seven && v.size() == 7)  // no |EC| target: order AB BC CD DA EA EB ED
    return EdgeLengthSet({v[0], v[1], v[2], v[3], v[4], v[5], 1.0, v[6]});
  throw Error(Errc::bad_input,
              allow_seven ? "expected 7 or 8 lengths" : "expected 8 lengths");
}

const char* kind_name(CriticalKind k) {
  switch (k) {
    case CriticalKind::LocalMin: return "local_min";
    case CriticalKind::LocalMax: return "local_max";
    case CriticalKind::LeftEndpoint: return "left_endpoint";
    case CriticalKind::RightEndpoint: return "right_endpoint";
  }
  return "local_min";
}

const char* stop_name(TraceStop s) {
  switch (s) {
    case TraceStop::StepLimit: return "step-limit";
    case TraceStop::KernelCollapse: return "kernel-collapse";
    case TraceStop::CorrectionDiverged: return "correction-diverged";
  }
  return "step-limit";
}

const char* verdict_name(Verdict v) {
  return v == Verdict::Rigid ? "rigid" : "infinitesimally-flexible";
}

int run_realize(const std::vector<std::string>& tokens,
                const std::string& problem_path, SolveOptions solve,
                const std::array<bool, 4>& solve_set,
                const CommonOptions& common) {
  std::vector<double> values;
  if (!problem_path.empty()) {
    ProblemFile p = load_problem(problem_path);
    values = p.lengths;
    // explicit flags win over file options
    if (!solve_set[0]) solve.grid = p.solve.grid;
    if (!solve_set[1]) solve.residual_tol = p.solve.residual_tol;
    if (!solve_set[2]) solve.congruence_tol = p.solve.congruence_tol;
    if (!solve_set[3]) solve.include_degenerate = p.solve.include_degenerate;
    if (!tokens.empty())
      throw Error(Errc::bad_input, "give lengths inline or via --problem, not both");
  } else {
    values = parse_number_list(tokens);
  }
  const EdgeLengthSet L = lengths_from(values, false);
  const RealizeResult res = find_realizations(L, solve);

  const double l1 = L.l(1);
  if (common.format == "json") {
    json out;
    out["lengths"] = L.values();
    out["count"] = res.realizations.size();
    out["realizations"] = json::array();
    for (const Realization& r : res.realizations) {
      json item;
      item["alpha"] = r.alpha();
      item["x1"] = r.base.x1 * l1;
      item["y1"] = r.base.y1 * l1;
      item["x2"] = r.base.x2 * l1;
      item["y2"] = r.base.y2 * l1;
      item["x3"] = r.x3 * l1;
      item["y3"] = r.y3 * l1;
      item["z3"] = r.z3 * l1;
      item["residual_norm"] = residual_norm(CoordVector::from(r), L);
      item["base_class"] = to_string(r.base_class);
      out["realizations"].push_back(item);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "lengths:";
  for (double v : L.values()) std::cout << " " << fmt15(v);
  std::cout << "\ncount: " << res.realizations.size() << "\n";
  int idx = 0;
  for (const Realization& r : res.realizations) {
    ++idx;
    std::cout << "realization " << idx << ": alpha=" << fmt15(r.alpha())
              << " base_class=" << to_string(r.base_class) << " residual_norm="
              << fmt15(residual_norm(CoordVector::from(r), L)) << "\n"
              << "  x1=" << fmt15(r.base.x1 * l1) << " y1=" << fmt15(r.base.y1 * l1)
              << " x2=" << fmt15(r.base.x2 * l1) << " y2=" << fmt15(r.base.y2 * l1)
              << " x3=" << fmt15(r.x3 * l1) << " y3=" << fmt15(r.y3 * l1)
              << " z3=" << fmt15(r.z3 * l1) << "\n";
  }
  return 0;
}

SweepProfile sweep_profile(const std::vector<std::string>& tokens,
                           const std::string& problem_path, double alpha_min,
                           double alpha_max, int grid) {
  std::vector<double> values;
  if (!problem_path.empty()) {
    if (!tokens.empty())
      throw Error(Errc::bad_input, "give lengths inline or via --problem, not both");
    values = load_problem(problem_path).lengths;
  } else {
    values = parse_number_list(tokens);
  }
  const EdgeLengthSet L = lengths_from(values, true);
  return ec_profile(L, alpha_min, alpha_max, grid);
}

int run_sweep(const SweepProfile& p) {
  std::ostringstream out;
  out << "alpha,branch,ec2,z3sq,base_class,admissible\n";
  for (const SweepSample& s : p.samples) {
    out << fmt17(s.alpha) << "," << s.branch << "," << fmt17(s.ec2) << ","
        << fmt17(s.z3sq) << "," << to_string(s.base_class) << ","
        << (s.admissible ? 1 : 0) << "\n";
  }
  std::cout << out.str();
  return 0;
}

int run_critical(const SweepProfile& p, const CommonOptions& common) {
  const std::vector<CriticalPoint> pts = critical_points(p);
  if (common.format == "json") {
    json out;
    out["critical_points"] = json::array();
    for (const CriticalPoint& c : pts) {
      out["critical_points"].push_back({{"kind", kind_name(c.kind)},
                                        {"alpha", c.alpha},
                                        {"value", c.value},
                                        {"branch", c.branch}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (const CriticalPoint& c : pts) {
    std::cout << kind_name(c.kind) << " alpha=" << fmt15(c.alpha)
              << " ec2=" << fmt15(c.value) << "\n";
  }
  return 0;
}

Realization realization_from_coords(const std::vector<double>& v) {
  if (v.size() != 7)
    throw Error(Errc::bad_input, "expected 7 coordinates: x1 y1 x2 y2 x3 y3 z3");
  Realization r;
  r.base = BaseQuad{v[0], v[1], v[2], v[3]};
  r.x3 = v[4];
  r.y3 = v[5];
  r.z3 = v[6];
  r.scale = 1.0;
  r.base_class = classify_base(r.base);
  return r;
}

int run_rigidity(const std::vector<std::string>& coord_tokens,
                 const std::string& lengths_text, double rank_tol,
                 const CommonOptions& common) {
  const Realization r = realization_from_coords(parse_number_list(coord_tokens));
  const EdgeLengthSet L = lengths_text.empty()
                              ? edge_lengths(r)
                              : lengths_from(split_and_parse(lengths_text), false);
  const RigidityReport rep = rigidity_verdict(r, L, rank_tol);

  double rn = 0.0;
  for (double res : rep.residuals) rn = std::max(rn, std::abs(res));
  if (common.format == "json") {
    json out;
    out["verdict"] = rep.verdict == Verdict::Rigid ? "rigid" : "infinitesimally_flexible";
    out["kernel_dim"] = rep.kernel_dim;
    out["residual_norm"] = rn;
    out["singular_values"] = rep.singular_values;
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "verdict: " << verdict_name(rep.verdict) << "\n"
            << "kernel_dim: " << rep.kernel_dim << "\n"
            << "residual_norm: " << fmt15(rn) << "\n"
            << "singular_values:";
  for (double s : rep.singular_values) std::cout << " " << fmt15(s);
  std::cout << "\n";
  return 0;
}

int run_flex_trace(const std::vector<std::string>& coord_tokens,
                   const std::string& lengths_text, int steps, double h,
                   const std::string& direction, const CommonOptions& common) {
  // built-in start: the flexible self-intersecting pyramid
  CoordVector c0{2.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0};
  if (!coord_tokens.empty()) {
    const auto v = parse_number_list(coord_tokens);
    if (v.size() != 7)
      throw Error(Errc::bad_input, "expected 7 coordinates: x1 y1 x2 y2 x3 y3 z3");
    c0 = CoordVector{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
  }
  Realization start;
  start.base = BaseQuad{c0.x1, c0.y1, c0.x2, c0.y2};
  start.x3 = c0.x3;
  start.y3 = c0.y3;
  start.z3 = c0.z3;
  const EdgeLengthSet L = lengths_text.empty()
                              ? edge_lengths(start)
                              : lengths_from(split_and_parse(lengths_text), false);

  const bool run_back = direction == "both" || direction == "backward";
  const bool run_fwd = direction == "both" || direction == "forward";
  TraceResult back, fwd;
  if (run_back) back = trace_family(c0, L, steps, -h);
  if (run_fwd) fwd = trace_family(c0, L, steps, h);

  struct Row {
    int step;
    CoordVector c;
  };
  std::vector<Row> rows;
  if (run_back) {
    for (size_t i = back.points.size(); i-- > 1;)
      rows.push_back({-static_cast<int>(i), back.points[i]});
  }
  rows.push_back({0, c0});
  if (run_fwd) {
    for (size_t i = 1; i < fwd.points.size(); ++i)
      rows.push_back({static_cast<int>(i), fwd.points[i]});
  }

  if (common.format == "json") {
    json out;
    out["points"] = json::array();
    for (const Row& row : rows) {
      const auto a = row.c.data();
      out["points"].push_back({{"step", row.step},
                               {"x1", a[0]},
                               {"y1", a[1]},
                               {"x2", a[2]},
                               {"y2", a[3]},
                               {"x3", a[4]},
                               {"y3", a[5]},
                               {"z3", a[6]},
                               {"residual", residual_norm(row.c, L)}});
    }
    if (run_back) out["stop_backward"] = stop_name(back.stop);
    if (run_fwd) out["stop_forward"] = stop_name(fwd.stop);
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "step x1 y1 x2 y2 x3 y3 z3 residual\n";
  for (const Row& row : rows) {
    std::cout << row.step;
    for (double v : row.c.data()) std::cout << " " << fmt15(v);
    std::cout << " " << fmt15(residual_norm(row.c, L)) << "\n";
  }
  if (run_back) std::cout << "stop_backward: " << stop_name(back.stop) << "\n";
  if (run_fwd) std::cout << "stop_forward: " << stop_name(fwd.stop) << "\n";
  return 0;
}

int run_dof(const std::string& census, int pin, const CommonOptions& common) {
  FaceVector f = FaceVector::parse(census);
  f.pinned = pin;
  f.validate();
  const auto [e, v] = counts(f);
  const DofBalance b = dof_balance(f);
  if (common.format == "json") {
    json out;
    out["e"] = e;
    out["v"] = v;
    out["freedoms"] = b.freedoms;
    out["relations"] = b.relations;
    out["balanced"] = b.balanced;
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "freedoms=" << b.freedoms << " relations=" << b.relations
            << " balanced=" << (b.balanced ? "true" : "false") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex quadrangular pyramid realization and rigidity toolkit"};
  app.require_subcommand(1);

  // realize
  auto* realize = app.add_subcommand(
      "realize", "enumerate convex realizations of eight edge lengths");
  std::vector<std::string> realize_tokens;
  std::string realize_problem;
  SolveOptions solve;
  CommonOptions realize_common;
  realize->add_option("lengths", realize_tokens,
                      "|AB| |BC| |CD| |DA| |EA| |EB| |EC| |ED|");
  realize->add_option("--problem", realize_problem, "JSON problem file");
  auto* opt_grid = realize->add_option("--grid", solve.grid, "sweep grid size")
                       ->capture_default_str();
  auto* opt_tol =
      realize->add_option("--tol", solve.residual_tol, "residual target")
          ->capture_default_str();
  auto* opt_ctol = realize
                       ->add_option("--congruence-tol", solve.congruence_tol,
                                    "congruence dedup tolerance")
                       ->capture_default_str();
  auto* opt_deg = realize->add_flag("--include-degenerate",
                                    solve.include_degenerate,
                                    "admit degenerate-base realizations");
  realize->add_option("--tangency-tol", solve.tangency_tol,
                      "double-root acceptance bound")
      ->capture_default_str();
  add_common(realize, realize_common);

  // sweep / critical share inputs
  std::vector<std::string> sweep_tokens;
  std::string sweep_problem;
  int sweep_grid = kDefaultGrid;
  double alpha_min = 0.0, alpha_max = std::numbers::pi;
  auto* sweep = app.add_subcommand("sweep", "CSV of |EC|^2 over the angle sweep");
  sweep->add_option("lengths", sweep_tokens,
                    "|AB| |BC| |CD| |DA| |EA| |EB| [|EC|] |ED|");
  sweep->add_option("--problem", sweep_problem, "JSON problem file");
  sweep->add_option("--grid", sweep_grid, "grid size")->capture_default_str();
  sweep->add_option("--alpha-min", alpha_min, "lower angle")->capture_default_str();
  sweep->add_option("--alpha-max", alpha_max, "upper angle")->capture_default_str();

  std::vector<std::string> crit_tokens;
  std::string crit_problem;
  int crit_grid = kDefaultGrid;
  double crit_min = 0.0, crit_max = std::numbers::pi;
  CommonOptions crit_common;
  auto* crit = app.add_subcommand("critical",
                                  "endpoints and extrema of the |EC|^2 profile");
  crit->add_option("lengths", crit_tokens,
                   "|AB| |BC| |CD| |DA| |EA| |EB| [|EC|] |ED|");
  crit->add_option("--problem", crit_problem, "JSON problem file");
  crit->add_option("--grid", crit_grid, "grid size")->capture_default_str();
  crit->add_option("--alpha-min", crit_min, "lower angle")->capture_default_str();
  crit->add_option("--alpha-max", crit_max, "upper angle")->capture_default_str();
  add_common(crit, crit_common);

  // rigidity
  std::vector<std::string> rig_coords;
  std::string rig_lengths;
  double rank_tol = 1e-8;
  CommonOptions rig_common;
  auto* rig = app.add_subcommand("rigidity",
                                 "rank analysis of the constraint Jacobian");
  rig->add_option("coords", rig_coords, "x1 y1 x2 y2 x3 y3 z3")->expected(7);
  rig->add_option("--lengths", rig_lengths,
                  "8 target lengths (default: measured from the coordinates)");
  rig->add_option("--rank-tol", rank_tol, "relative singular value cutoff")
      ->capture_default_str();
  add_common(rig, rig_common);

  // flex-trace
  std::vector<std::string> trace_coords;
  std::string trace_lengths;
  int trace_steps = 40;
  double trace_h = 0.01;
  std::string trace_direction = "both";
  CommonOptions trace_common;
  auto* trace = app.add_subcommand(
      "flex-trace", "predictor-corrector trace of a flexible family");
  trace->add_option("coords", trace_coords,
                    "start coordinates (default: built-in flexible pyramid)");
  trace->add_option("--lengths", trace_lengths,
                    "8 target lengths (default: measured from the start)");
  trace->add_option("--steps", trace_steps, "steps per direction")
      ->capture_default_str();
  trace->add_option("--step-size", trace_h, "predictor step")->capture_default_str();
  trace->add_option("--direction", trace_direction, "both | forward | backward")
      ->check(CLI::IsMember({"both", "forward", "backward"}))
      ->capture_default_str();
  add_common(trace, trace_common);

  // dof
  std::string dof_census;
  int dof_pin = 0;
  CommonOptions dof_common;
  auto* dof = app.add_subcommand("dof", "freedoms vs relations for a face census");
  dof->add_option("census", dof_census, "face census, e.g. 3:4,4:1")->required();
  dof->add_option("--pin", dof_pin, "pinned face size (default: largest)");
  add_common(dof, dof_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*realize) {
      const std::array<bool, 4> set = {opt_grid->count() > 0, opt_tol->count() > 0,
                                       opt_ctol->count() > 0, opt_deg->count() > 0};
      return run_realize(realize_tokens, realize_problem, solve, set,
                         realize_common);
    }
    if (*sweep)
      return run_sweep(
          sweep_profile(sweep_tokens, sweep_problem, alpha_min, alpha_max,
                        sweep_grid));
    if (*crit)
      return run_critical(
          sweep_profile(crit_tokens, crit_problem, crit_min, crit_max, crit_grid),
          crit_common);
    if (*rig) return run_rigidity(rig_coords, rig_lengths, rank_tol, rig_common);
    if (*trace)
      return run_flex_trace(trace_coords, trace_lengths, trace_steps, trace_h,
                            trace_direction, trace_common);
    if (*dof) return run_dof(dof_census, dof_pin, dof_common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_precondition_error(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
