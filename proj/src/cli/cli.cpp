#include "expcomp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "expcomp/artifact.hpp"
#include "expcomp/dataset.hpp"
#include "expcomp/errors.hpp"
#include "expcomp/gof.hpp"
#include "expcomp/simd/kernels.hpp"
#include "expcomp/simulation.hpp"
#include "expcomp/special_functions.hpp"

namespace expcomp {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* pattern, auto... values) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, values...);
  return buf;
}

// Shortest text that reads back to the same double.
std::string exact(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

struct DataOptions {
  std::string path;
  std::string column = "0";
  double scale = 1.0;

  ClaimsDataset load() const { return ingest_csv(path, parse_column_ref(column), scale); }
  json describe(const ClaimsDataset& d) const {
    return json{{"path", path}, {"column", column}, {"scale", scale}, {"n", d.values.size()}};
  }
};

void add_data_options(CLI::App* sub, DataOptions& o) {
  sub->add_option("--data", o.path, "CSV file, one claim per row")->required();
  sub->add_option("--column", o.column, "Column name or 0-based index")->capture_default_str();
  sub->add_option("--scale", o.scale, "Multiply every value by this factor")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_grid_options(CLI::App* sub, EtaGrid& g) {
  sub->add_option("--eta-min", g.lower, "Smallest candidate exponent")->capture_default_str();
  sub->add_option("--eta-max", g.upper, "Largest candidate exponent")->capture_default_str();
  sub->add_option("--eta-step", g.coarse_step, "Coarse grid spacing")->capture_default_str();
  sub->add_option("--refine", g.refinement_rounds, "Refinement rounds (step / 10 each)")
      ->capture_default_str();
}

ModelId require_model(const std::string& key) {
  if (auto m = parse_model(key)) return *m;
  std::string known;
  for (ModelId m : all_models()) known += (known.empty() ? "" : ", ") + std::string(model_key(m));
  throw UsageError("unknown model '" + key + "' (expected one of: " + known + ")");
}

struct Run {
  std::ostream& out;
  std::ostream& err;
  json config;
  json results;
};

// ---------------------------------------------------------------- fit

struct FitCommand {
  DataOptions data;
  EtaGrid grid;
  std::string model = "exp-exp-pareto";
  std::string out_path;
  bool as_json = false;
};

int run_fit(const FitCommand& c, Run& run) {
  const ModelId model = require_model(c.model);
  const ClaimsDataset data = c.data.load();
  run.config["dataset"] = c.data.describe(data);
  run.config["model"] = c.model;
  run.config["grid"] = to_json(c.grid);

  const FitResult f = fit(model, data.values, c.grid);
  const GofRow row = score(f);
  json r = to_json(f);
  for (const char* k : {"aic", "bic", "aicc", "caic"}) r[k] = to_json(row)[k];
  run.results = r;

  if (c.as_json) {
    run.out << r.dump(2) << '\n';
  } else {
    run.out << fmt("%-12s %s\n", "model", std::string(model_label(model)).c_str());
    run.out << fmt("%-12s %zu\n", "n", f.n);
    if (is_composite(model)) {
      run.out << fmt("%-12s %.6f\n", "theta", f.theta);
      run.out << fmt("%-12s %.6f%s\n", "eta", f.eta, has_free_exponent(model) ? "" : " (fixed)");
      run.out << fmt("%-12s %zu\n", "m", f.m);
      run.out << fmt("%-12s %.6f\n", "breakpoint", std::pow(f.theta, 1.0 / f.eta));
    } else {
      run.out << fmt("%-12s %.6f\n", "scale", f.theta);
      run.out << fmt("%-12s %.6f\n", "shape", f.eta);
    }
    run.out << fmt("%-12s %.4f\n%-12s %.4f\n%-12s %.4f\n%-12s %.4f\n%-12s %.4f\n", "nll", row.nll,
                   "aic", row.aic, "bic", row.bic, "aicc", row.aicc, "caic", row.caic);
  }
  if (!c.out_path.empty()) {
    std::string csv = "model,theta,eta,m,n,p,nll,aic,bic,aicc,caic\n";
    csv += std::string(model_key(model)) + ',' + exact(f.theta) + ',' + exact(f.eta) + ',' +
           std::to_string(f.m) + ',' + std::to_string(f.n) + ',' + std::to_string(f.p) + ',' +
           exact(row.nll) + ',' + exact(row.aic) + ',' + exact(row.bic) + ',' + exact(row.aicc) +
           ',' + exact(row.caic) + '\n';
    write_text(c.out_path, csv);
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- compare

struct CompareCommand {
  DataOptions data;
  EtaGrid grid;
  std::vector<std::string> models{"exp-ig-pareto", "exp-exp-pareto", "ig-pareto-1p",
                                  "exp-pareto-1p", "weibull",        "inverse-gamma"};
  std::string criterion = "bic";
  std::string literature;
  std::string out_path;
  bool as_json = false;
};

int run_compare(const CompareCommand& c, Run& run) {
  if (c.models.size() < 2) throw UsageError("compare needs at least two models");
  std::vector<ModelId> models;
  for (const auto& key : c.models) models.push_back(require_model(key));
  const auto criterion = parse_criterion(c.criterion);
  if (!criterion) throw UsageError("unknown criterion '" + c.criterion + "'");
  if (!c.literature.empty() && literature_rows(c.literature).empty()) {
    throw UsageError("unknown literature dataset '" + c.literature + "' (danish, norwegian)");
  }

  const ClaimsDataset data = c.data.load();
  run.config["dataset"] = c.data.describe(data);
  run.config["models"] = c.models;
  run.config["criterion"] = c.criterion;
  run.config["literature"] = c.literature;
  run.config["grid"] = to_json(c.grid);

  std::vector<GofRow> rows;
  std::vector<std::pair<std::string, std::string>> failed;
  for (ModelId m : models) {
    try {
      rows.push_back(score(fit(m, data.values, c.grid)));
    } catch (const FitFailure& e) {
      failed.emplace_back(std::string(model_key(m)), e.what());
    }
  }
  if (rows.empty()) throw FitFailure("no model could be fitted");
  for (const auto& lit : literature_rows(c.literature)) rows.push_back(lit);

  const RankedTable table = compare(rows, *criterion);
  json jrows = json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    json j = to_json(table.rows[i]);
    j["status"] = "ok";
    for (std::size_t k = 0; k < kAllCriteria.size(); ++k) {
      j["rank"][std::string(criterion_name(kAllCriteria[k]))] = table.ranks[i][k];
    }
    jrows.push_back(j);
  }
  for (const auto& [key, what] : failed) {
    jrows.push_back(json{{"model", key}, {"status", "failed"}, {"error", what}});
  }
  run.results = json{{"criterion", c.criterion}, {"n", data.values.size()}, {"rows", jrows}};

  if (c.as_json) {
    run.out << run.results.dump(2) << '\n';
  } else {
    run.out << fmt("n = %zu, ranked by %s\n", data.values.size(), c.criterion.c_str());
    run.out << fmt("%4s  %-40s %2s %12s %12s %12s %12s %12s\n", "rank", "model", "p", "nll", "aic",
                   "bic", "aicc", "caic");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      run.out << fmt("%4zu  %-40s %2d %12.4f %12.4f %12.4f %12.4f %12.4f\n", i + 1,
                     r.label.c_str(), r.p, r.nll, r.aic, r.bic, r.aicc, r.caic);
    }
    for (const auto& [key, what] : failed) {
      run.out << fmt("%4s  %-40s failed: %s\n", "-", key.c_str(), what.c_str());
    }
  }
  if (!c.out_path.empty()) {
    std::string csv = "rank,label,model,p,n,nll,aic,bic,aicc,caic,literature,status\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      csv += std::to_string(i + 1) + ",\"" + r.label + "\"," +
             (r.model ? std::string(model_key(*r.model)) : std::string()) + ',' +
             std::to_string(r.p) + ',' + std::to_string(r.n) + ',' + exact(r.nll) + ',' +
             exact(r.aic) + ',' + exact(r.bic) + ',' + exact(r.aicc) + ',' + exact(r.caic) + ',' +
             (r.literature ? "1" : "0") + ",ok\n";
    }
    for (const auto& f : failed) csv += ",," + f.first + ",,,,,,,,0,failed\n";
    write_text(c.out_path, csv);
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateCommand {
  EtaGrid grid;
  std::string model = "exp-exp-pareto";
  std::optional<double> eta;
  std::optional<double> theta;
  std::size_t n = 200;
  std::size_t replicates = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool published_grid = false;
  std::string out_path;
  bool as_json = false;
};

int run_simulate(const SimulateCommand& c, Run& run) {
  SimulationOptions options;
  options.grid = c.grid;
  options.threads = c.threads;
  run.config["grid"] = to_json(c.grid);
  run.config["seed"] = c.seed;
  run.config["replicates"] = c.replicates;

  std::vector<Scenario> scenarios;
  if (c.published_grid) {
    scenarios = published_scenarios(c.seed, c.replicates);
  } else {
    if (!c.eta || !c.theta) throw UsageError("simulate needs --eta and --theta (or --published-grid)");
    Scenario s;
    s.model = require_model(c.model);
    s.eta = *c.eta;
    s.theta = *c.theta;
    s.n = c.n;
    s.replicates = c.replicates;
    s.base_seed = c.seed;
    scenarios.push_back(s);
    run.config["model"] = c.model;
    run.config["eta"] = s.eta;
    run.config["theta"] = s.theta;
    run.config["n"] = s.n;
  }
  run.config["published_grid"] = c.published_grid;

  std::vector<SimulationReport> reports;
  for (const auto& s : scenarios) reports.push_back(run_scenario(s, options));

  json jr = json::array();
  for (const auto& r : reports) jr.push_back(to_json(r));
  run.results = json{{"reports", jr}};

  if (c.as_json) {
    run.out << run.results.dump(2) << '\n';
  } else {
    run.out << fmt("%-15s %5s %5s %5s %6s %10s %10s %10s %10s %8s\n", "model", "eta", "theta", "n",
                   "r", "eta_mean", "theta_mean", "eta_sd", "theta_sd", "failures");
    for (const auto& r : reports) {
      const auto& s = r.scenario;
      run.out << fmt("%-15s %5g %5g %5zu %6zu %10.6f %10.6f %10.6f %10.6f %8zu\n",
                     std::string(model_key(s.model)).c_str(), s.eta, s.theta, s.n, s.replicates,
                     r.eta_mean, r.theta_mean, r.eta_sd, r.theta_sd, r.failures);
      if (c.published_grid) {
        if (const auto* p = find_published(s.eta, s.theta, s.n)) {
          run.out << fmt("%-15s %5s %5s %5s %6s %10.6f %10.6f %10.6f %10.6f\n", "  published", "",
                         "", "", "", p->eta_mean, p->theta_mean, p->eta_sd, p->theta_sd);
        }
      }
    }
  }
  if (!c.out_path.empty()) {
    std::string csv =
        "model,eta,theta,n,replicates,base_seed,eta_mean,theta_mean,eta_sd,theta_sd,failures\n";
    for (const auto& r : reports) {
      const auto& s = r.scenario;
      csv += std::string(model_key(s.model)) + ',' + exact(s.eta) + ',' + exact(s.theta) + ',' +
             std::to_string(s.n) + ',' + std::to_string(s.replicates) + ',' +
             std::to_string(s.base_seed) + ',' + exact(r.eta_mean) + ',' + exact(r.theta_mean) +
             ',' + exact(r.eta_sd) + ',' + exact(r.theta_sd) + ',' + std::to_string(r.failures) +
             '\n';
    }
    write_text(c.out_path, csv);
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- density

struct DensityCommand {
  std::string model = "exp-exp-pareto";
  double theta = 1.0;
  double eta = 1.0;
  double from = 0.0;
  double to = 5.0;
  std::size_t points = 200;
  bool cdf = false;
  std::optional<double> limited_moment;
  std::string out_path;
};

double baseline_limited_moment(const Density& d, double t, double b) {
  if (const auto* w = std::get_if<WeibullDensity>(&d)) {
    const double z = std::pow(b / w->scale(), w->shape());
    const double a = 1.0 + t / w->shape();
    return std::pow(w->scale(), t) * gamma_function(a) * regularized_lower_gamma(a, z) +
           std::pow(b, t) * std::exp(-z);
  }
  const auto& ig = std::get<InverseGammaDensity>(d);
  const double z = ig.scale() / b;
  return std::pow(ig.scale(), t) * upper_incomplete_gamma(ig.shape() - t, z) /
             gamma_function(ig.shape()) +
         std::pow(b, t) * regularized_lower_gamma(ig.shape(), z);
}

int run_density(const DensityCommand& c, Run& run) {
  const ModelId model = require_model(c.model);
  if (!(c.from >= 0.0) || !(c.to > c.from) || !std::isfinite(c.to)) {
    throw DomainError("density range needs 0 <= from < to");
  }
  if (c.points < 2) throw DomainError("density needs at least two points");
  if (c.limited_moment && !(*c.limited_moment >= 0.0)) {
    throw DomainError("limited-moment order must be nonnegative");
  }
  const Density d = build(model, c.theta, c.eta);
  run.config = json{{"model", c.model}, {"theta", c.theta}, {"eta", c.eta},
                    {"from", c.from},   {"to", c.to},       {"points", c.points},
                    {"cdf", c.cdf}};
  if (c.limited_moment) run.config["limited_moment"] = *c.limited_moment;

  std::string csv = "y,pdf";
  if (c.cdf) csv += ",cdf";
  if (c.limited_moment) csv += ",limited_moment";
  csv += '\n';
  json ys = json::array();
  json pdfs = json::array();
  const double step = (c.to - c.from) / static_cast<double>(c.points - 1);
  for (std::size_t i = 0; i < c.points; ++i) {
    const double y = i + 1 == c.points ? c.to : c.from + static_cast<double>(i) * step;
    const double f = y > 0.0 ? pdf(d, y) : 0.0;
    csv += exact(y) + ',' + exact(f);
    if (c.cdf) csv += ',' + exact(y > 0.0 ? cdf(d, y) : 0.0);
    if (c.limited_moment) {
      double lm = 0.0;
      if (y > 0.0) {
        lm = is_composite(model)
                 ? limited_moment_closed_form(model, c.theta, c.eta, *c.limited_moment, y)
                 : baseline_limited_moment(d, *c.limited_moment, y);
      }
      csv += ',' + exact(lm);
    }
    csv += '\n';
    ys.push_back(y);
    pdfs.push_back(f);
  }
  run.results = json{{"y", ys}, {"pdf", pdfs}};
  if (c.out_path.empty()) {
    run.out << csv;
  } else {
    write_text(c.out_path, csv);
  }
  return exit_code::kOk;
}

// ---------------------------------------------------------------- dispatch

struct Parsed {
  std::string isa = "auto";
  std::string artifact;
  std::string replay_path;
  FitCommand fit;
  CompareCommand compare;
  SimulateCommand simulate;
  DensityCommand density;
};

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            json* captured);

int run_replay(const std::string& path, std::ostream& out, std::ostream& err) {
  const RunArtifact artifact = read_artifact(path);
  std::vector<std::string> args;
  for (std::size_t i = 0; i < artifact.command.size(); ++i) {
    const std::string& a = artifact.command[i];
    if (a == "--artifact" || a == "--out" || a == "--isa") {
      ++i;
      continue;
    }
    if (a.rfind("--artifact=", 0) == 0 || a.rfind("--out=", 0) == 0 || a.rfind("--isa=", 0) == 0) {
      continue;
    }
    args.push_back(a);
  }
  if (artifact.config.contains("isa")) {
    args.insert(args.begin(), {"--isa", artifact.config["isa"].get<std::string>()});
  }
  std::ostringstream sink;
  json fresh;
  const int code = execute(args, sink, err, &fresh);
  if (code != exit_code::kOk) return code;
  if (fresh == artifact.results) {
    out << "replay: results identical to " << path << " (recorded " << artifact.timestamp << ")\n";
    return exit_code::kOk;
  }
  out << "replay: results differ from " << path << '\n';
  return exit_code::kReplayMismatch;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            json* captured) {
  Parsed p;
  CLI::App app{"Exponentiated composite loss models: fitting, comparison, simulation", "expcomp"};
  app.require_subcommand(1);
  app.add_option("--isa", p.isa, "Kernel set: auto, scalar, avx2")->capture_default_str();
  app.add_option("--artifact", p.artifact, "Write a JSON run record to this path");

  auto* fit_cmd = app.add_subcommand("fit", "Fit one model to a claims file");
  add_data_options(fit_cmd, p.fit.data);
  add_grid_options(fit_cmd, p.fit.grid);
  fit_cmd->add_option("--model", p.fit.model, "Model key")->capture_default_str();
  fit_cmd->add_option("--out", p.fit.out_path, "Write results CSV");
  fit_cmd->add_flag("--json", p.fit.as_json, "Print JSON instead of a table");

  auto* cmp_cmd = app.add_subcommand("compare", "Fit several models and rank them");
  add_data_options(cmp_cmd, p.compare.data);
  add_grid_options(cmp_cmd, p.compare.grid);
  cmp_cmd->add_option("--models", p.compare.models, "Comma-separated model keys")
      ->delimiter(',')
      ->capture_default_str();
  cmp_cmd->add_option("--criterion", p.compare.criterion, "nll, aic, bic, aicc or caic")
      ->capture_default_str();
  cmp_cmd->add_option("--literature", p.compare.literature,
                      "Append published four-parameter rows: danish or norwegian");
  cmp_cmd->add_option("--out", p.compare.out_path, "Write ranked table CSV");
  cmp_cmd->add_flag("--json", p.compare.as_json, "Print JSON instead of a table");

  auto* sim_cmd = app.add_subcommand("simulate", "Estimator recovery study");
  add_grid_options(sim_cmd, p.simulate.grid);
  sim_cmd->add_option("--model", p.simulate.model, "Model key")->capture_default_str();
  sim_cmd->add_option("--eta", p.simulate.eta, "True exponent");
  sim_cmd->add_option("--theta", p.simulate.theta, "True breakpoint parameter");
  sim_cmd->add_option("--n", p.simulate.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--r", p.simulate.replicates, "Replicates")->capture_default_str();
  sim_cmd->add_option("--seed", p.simulate.seed, "Base seed")->capture_default_str();
  sim_cmd->add_option("--threads", p.simulate.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sim_cmd->add_flag("--published-grid", p.simulate.published_grid,
                    "Run the twelve reference scenarios");
  sim_cmd->add_option("--out", p.simulate.out_path, "Write report CSV");
  sim_cmd->add_flag("--json", p.simulate.as_json, "Print JSON instead of a table");

  auto* den_cmd = app.add_subcommand("density", "Emit density curve data as CSV");
  den_cmd->add_option("--model", p.density.model, "Model key")->capture_default_str();
  den_cmd->add_option("--theta", p.density.theta, "Breakpoint parameter (scale for baselines)")
      ->capture_default_str();
  den_cmd->add_option("--eta", p.density.eta, "Exponent (shape for baselines)")
      ->capture_default_str();
  den_cmd->add_option("--from", p.density.from, "First abscissa")->capture_default_str();
  den_cmd->add_option("--to", p.density.to, "Last abscissa")->capture_default_str();
  den_cmd->add_option("--points", p.density.points, "Number of points")->capture_default_str();
  den_cmd->add_flag("--cdf", p.density.cdf, "Add a cdf column");
  den_cmd->add_option("--limited-moment", p.density.limited_moment,
                      "Add E[(Y ^ y)^t] with the cap at each abscissa");
  den_cmd->add_option("--out", p.density.out_path, "Write CSV here instead of stdout");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded command and compare results");
  replay_cmd->add_option("artifact", p.replay_path, "Run record written by --artifact")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  if (p.isa == "auto") {
    simd::select_isa(simd::detected_isa());
  } else if (auto isa = simd::parse_isa(p.isa); isa && simd::isa_supported(*isa)) {
    simd::select_isa(*isa);
  } else {
    err << "error: kernel set '" << p.isa << "' is unknown or unsupported on this CPU\n";
    return exit_code::kUsage;
  }

  if (replay_cmd->parsed()) return run_replay(p.replay_path, out, err);

  Run run{out, err, json::object(), json::object()};
  int code = exit_code::kOk;
  std::string name;
  if (fit_cmd->parsed()) {
    name = "fit";
    code = run_fit(p.fit, run);
  } else if (cmp_cmd->parsed()) {
    name = "compare";
    code = run_compare(p.compare, run);
  } else if (sim_cmd->parsed()) {
    name = "simulate";
    code = run_simulate(p.simulate, run);
  } else {
    name = "density";
    code = run_density(p.density, run);
  }
  run.config["subcommand"] = name;
  run.config["isa"] = std::string(simd::isa_name(simd::active_kernels().isa));

  if (captured) *captured = run.results;
  if (!p.artifact.empty()) {
    RunArtifact a{args, run.config, run.results, utc_timestamp()};
    write_artifact(p.artifact, a);
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(args, out, err, nullptr);
  } catch (const ParseError& e) {
    err << "error";
    if (e.row() > 0) err << " (row " << e.row() << ")";
    err << ": " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const FitFailure& e) {
    err << "fit failed: " << e.what() << '\n';
    return exit_code::kFitFailure;
  } catch (const AggregateFailure& e) {
    err << "simulation failed: " << e.what() << '\n';
    return exit_code::kFitFailure;
  } catch (const ConvergenceError& e) {
    err << "fit failed: " << e.what() << '\n';
    return exit_code::kFitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
}

}  // namespace expcomp
