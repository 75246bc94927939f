// Command-line harness: dataset generation, online training with JSON/CSV run
// reports, oracle verification, and report merging.  All artifacts are
// deterministic functions of the flags and input files.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hebbdual/datagen.hpp"
#include "hebbdual/duality.hpp"
#include "hebbdual/dynamics.hpp"
#include "hebbdual/errors.hpp"
#include "hebbdual/io.hpp"
#include "hebbdual/learners.hpp"
#include "hebbdual/linalg.hpp"
#include "hebbdual/oracles.hpp"

namespace {

using namespace hebbdual;

constexpr const char* kToolVersion = "0.1.0";

double rel_distance(const Vec& a, const Vec& b) {
  return norm2(sub(a, b)) / std::max(norm2(b), 1e-30);
}

Dataset load_dataset(const std::string& path) {
  return dataset_from_json(read_file(path));
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  std::size_t t = 100;
  std::uint64_t seed = 0;
  double noise = 0.1;
  bool positive_w = false;
  double margin = 0.5;
  std::size_t m = 1;
  double gap = 4.0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  Dataset ds;
  if (a.kind == "regression") {
    ds = gen_regression(a.n, a.t, a.noise, a.seed, a.positive_w);
  } else if (a.kind == "classification") {
    ds = gen_classification(a.n, a.t, a.margin, a.seed);
  } else {
    ds = gen_spiked(a.n, a.t, a.m, a.gap, a.seed);
  }
  write_file_atomic(a.out, dataset_to_json(ds));
  std::cout << "wrote " << a.kind << " dataset n=" << ds.n() << " t=" << ds.t()
            << " seed=" << a.seed << " -> " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string model;
  std::string data;
  std::string out;
  int epochs = 10;
  double eta = 0.1;
  std::string schedule = "constant";
  double decay = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  double kappa = 1.0;
  double mu_scale = 1.0;
  bool normalize = false;
  std::size_t m = 1;
  std::optional<double> eta_m;
};

std::optional<DualModel> dual_model_of(const std::string& model) {
  if (model == "ridge") return DualModel::Ridge;
  if (model == "svm") return DualModel::Svm;
  if (model == "logistic") return DualModel::Logistic;
  return std::nullopt;
}

std::filesystem::path csv_sibling(const std::filesystem::path& report_path) {
  std::filesystem::path p = report_path;
  p.replace_extension(".csv");
  return p;
}

int run_train(const TrainArgs& a) {
  const Dataset ds = load_dataset(a.data);
  Schedule sched;
  if (a.schedule == "inverse-time")
    sched.kind = ScheduleKind::InverseTime;
  sched.decay = a.decay;

  RunReport rep;
  rep.model = a.model;
  rep.tool_version = kToolVersion;
  rep.dataset_meta = ds.meta;
  rep.hyper.epochs = a.epochs;
  rep.hyper.eta = a.eta;
  rep.hyper.schedule = a.schedule;
  rep.hyper.decay = a.decay;
  rep.hyper.seed = a.seed;
  rep.hyper.lambda = a.lambda;

  if (a.model == "sm") {
    const double eta_m = a.eta_m.value_or(a.eta);
    rep.hyper.eta_m = eta_m;
    rep.hyper.m = a.m;
    SmState s = SmState::init(a.m, ds.n(), a.eta, eta_m, a.seed);
    const TrainTrace trace = train(s, ds, a.epochs, sched);
    const SubspaceBasis pca = pca_subspace(ds.x, a.m);
    for (const TrainRow& row : trace.rows) {
      EpochMetrics em;
      em.epoch = row.epoch;
      em.mean_update_norm = row.mean_update_norm;
      em.update_density = row.update_density;
      if (row.filter_basis)
        em.subspace_error = subspace_error(*row.filter_basis, pca.basis);
      rep.epochs.push_back(em);
    }
    rep.final_W = s.W;
    rep.final_M = s.M;
    rep.verification.subspace_error = rep.epochs.back().subspace_error;
    rep.verification.fixed_point_residuals = trace.rows.back().max_dynamics_residual;
  } else {
    const double lambda_report = a.lambda.value_or(0.0);
    SupervisedState s;
    if (a.model == "ridge") {
      s = SupervisedState::ridge(ds.n(), a.eta, lambda_report);
      rep.hyper.lambda_eff = lambda_report;
    } else if (a.model == "svm") {
      s = SupervisedState::svm(ds.n(), a.eta, a.kappa);
      rep.hyper.kappa = a.kappa;
    } else if (a.model == "logistic") {
      s = SupervisedState::logistic(ds.n(), a.eta);
    } else {
      s = SupervisedState::expgrad(ds.n(), a.eta, Vec(ds.n(), a.mu_scale),
                                   a.normalize);
      rep.hyper.mu_scale = a.mu_scale;
    }
    const TrainTrace trace = train(s, ds, a.epochs, sched, lambda_report);
    const auto dm = dual_model_of(a.model);
    for (const TrainRow& row : trace.rows) {
      EpochMetrics em;
      em.epoch = row.epoch;
      em.primal_objective = row.primal_objective;
      em.train_error = row.train_error;
      em.mean_update_norm = row.mean_update_norm;
      em.update_density = row.update_density;
      if (!row.duals.empty() && dm && a.lambda && *a.lambda > 0.0) {
        em.dual_objective = scaled_dual_objective(*dm, row.duals, ds.x, *ds.y,
                                                  *a.lambda, a.kappa);
        const auto& primal_side =
            a.model == "svm" ? row.smoothed_primal : row.primal_objective;
        if (primal_side) em.duality_gap = *primal_side - *em.dual_objective;
      }
      rep.epochs.push_back(em);
    }
    rep.final_w = s.w;
    if (!trace.rows.back().duals.empty())
      rep.dual_snapshot = trace.rows.back().duals;
    rep.verification.fixed_point_residuals = trace.rows.back().max_dynamics_residual;
    if (a.model != "expgrad") rep.verification.span_residual = span_residual(s.w, ds.x);
    if (a.model == "ridge" && a.lambda && *a.lambda > 0.0)
      rep.verification.oracle_distance =
          rel_distance(s.w, ridge_closed_form(ds.x, *ds.y, *a.lambda));
  }

  write_file_atomic(a.out, report_to_json(rep));
  const std::filesystem::path csv_path = csv_sibling(a.out);
  write_file_atomic(csv_path, report_to_csv(rep));
  std::cout << "trained " << a.model << " epochs=" << a.epochs;
  if (rep.epochs.back().primal_objective)
    std::cout << " final_primal=" << format_double(*rep.epochs.back().primal_objective);
  if (rep.epochs.back().subspace_error)
    std::cout << " final_subspace_error="
              << format_double(*rep.epochs.back().subspace_error);
  std::cout << " -> " << a.out << " " << csv_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string data;
  std::string report;
  double tol_weights = 1e-3;
  double tol_gap = 1e-6;
  double tol_identity = 1e-6;
  double tol_fixed_point = 1e-5;
  double tol_kkt = 1e-6;
  double tol_span = 1e-8;
  double tol_subspace = 0.1;
  double tol_mse = 1e-3;
};

struct CheckLog {
  int failed = 0;
  int passed = 0;
  int skipped = 0;

  void check(const std::string& name, double value, double tol) {
    const bool ok = value <= tol;
    (ok ? passed : failed) += 1;
    std::cout << (ok ? "PASS " : "FAIL ") << name
              << " value=" << format_double(value)
              << " tol=" << format_double(tol) << "\n";
  }
  void skip(const std::string& name, const std::string& reason) {
    ++skipped;
    std::cout << "SKIPPED " << name << " reason=" << reason << "\n";
  }
};

int run_verify(const VerifyArgs& a) {
  const Dataset ds = load_dataset(a.data);
  const RunReport rep = report_from_json(read_file(a.report));
  const double t = static_cast<double>(ds.t());
  const double lambda =
      (rep.hyper.lambda && *rep.hyper.lambda > 0.0) ? *rep.hyper.lambda : 1.0 / t;
  CheckLog log;

  if (rep.model == "ridge" || rep.model == "svm" || rep.model == "logistic") {
    if (!ds.y) {
      log.skip("batch_dual_checks", "dataset has no labels");
    } else if (!rep.final_w) {
      throw std::runtime_error("verify: report has no final weights");
    } else if (rep.model == "ridge") {
      const Vec oracle = ridge_closed_form(ds.x, *ds.y, lambda);
      log.check("weight_distance", rel_distance(*rep.final_w, oracle), a.tol_weights);
      const DualSolveResult dual = batch_dual_solve(DualModel::Ridge, ds.x, *ds.y, lambda);
      const Vec w_dual = weights_from_duals(Regularizer::l2(lambda), dual.z, ds.x, lambda);
      log.check("oracle_duality_gap",
                duality_gap(DualModel::Ridge, ds.x, *ds.y, w_dual, dual.z, lambda),
                a.tol_gap);
      double stat = 0.0;
      for (std::size_t i = 0; i < ds.t(); ++i)
        stat = std::max(stat,
                        std::abs(dual.z[i] - ((*ds.y)[i] - dot(w_dual, ds.x[i]))));
      log.check("dual_stationarity", stat, a.tol_identity);
      log.check("span_residual", span_residual(*rep.final_w, ds.x), a.tol_span);
    } else {
      const auto dm = *dual_model_of(rep.model);
      const double kappa = rep.hyper.kappa.value_or(1.0);
      const DualSolveResult dual = batch_dual_solve(dm, ds.x, *ds.y, lambda, kappa);
      log.check("batch_kkt", dual.kkt_residual, a.tol_kkt);
      Vec zy(dual.z.size());  // classifier duals drive the label-signed samples
      for (std::size_t i = 0; i < zy.size(); ++i) zy[i] = dual.z[i] * (*ds.y)[i];
      const Vec w_dual = weights_from_duals(Regularizer::l2(lambda), zy, ds.x, lambda);
      double ident = 0.0;
      for (std::size_t i = 0; i < ds.t(); ++i) {
        const double target =
            rep.model == "svm"
                ? svm_activation(w_dual, ds.x[i], (*ds.y)[i], kappa)
                : sigmoid(-(*ds.y)[i] * dot(w_dual, ds.x[i]));
        ident = std::max(ident, std::abs(dual.z[i] - target));
      }
      log.check("fixed_point_identity", ident, a.tol_fixed_point);
      log.check("span_residual", span_residual(*rep.final_w, ds.x), a.tol_span);
    }
  } else if (rep.model == "expgrad") {
    if (!rep.final_w) throw std::runtime_error("verify: report has no final weights");
    double wmin = *std::min_element(rep.final_w->begin(), rep.final_w->end());
    // positivity audit: every component must be strictly positive
    log.check("positivity", wmin > 0.0 ? 0.0 : 1.0, 0.5);
    if (ds.y)
      log.check("final_mse", mean_squared_error(*rep.final_w, ds), a.tol_mse);
    else
      log.skip("final_mse", "dataset has no labels");
  } else if (rep.model == "sm") {
    if (!rep.final_W || !rep.final_M)
      throw std::runtime_error("verify: report has no final filter state");
    SmState s;
    s.W = *rep.final_W;
    s.M = *rep.final_M;
    const Mat learned = sm_filter_basis(s);
    const std::size_t m = rep.hyper.m.value_or(rep.final_W->rows());
    const Mat reference = (ds.truth && ds.truth->basis)
                              ? *ds.truth->basis
                              : pca_subspace(ds.x, m).basis;
    log.check("subspace_error", subspace_error(learned, reference), a.tol_subspace);
  } else {
    throw std::runtime_error("verify: unknown model '" + rep.model + "' in report");
  }

  std::cout << "verify: " << log.passed << " passed, " << log.failed
            << " failed, " << log.skipped << " skipped\n";
  return log.failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report (merge)

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string format = "csv";
};

struct SummaryRow {
  std::string model;
  std::uint64_t seed = 0;
  int epochs = 0;
  double eta = 0.0;
  std::optional<double> lambda;
  std::optional<double> kappa;
  std::optional<std::size_t> m;
  std::optional<double> final_primal;
  std::optional<double> final_gap;
  std::optional<double> final_density;
  std::optional<double> final_subspace_error;
  std::optional<double> oracle_distance;
  std::optional<double> span_residual;
};

int run_report(const ReportArgs& a) {
  std::vector<SummaryRow> rows;
  for (const std::string& path : a.inputs) {
    RunReport rep;
    try {
      rep = report_from_json(read_file(path));
    } catch (const std::exception& e) {
      std::cerr << "report: " << path << ": " << e.what() << "\n";
      return 1;
    }
    SummaryRow row;
    row.model = rep.model;
    row.seed = rep.hyper.seed;
    row.epochs = rep.hyper.epochs;
    row.eta = rep.hyper.eta;
    row.lambda = rep.hyper.lambda;
    row.kappa = rep.hyper.kappa;
    row.m = rep.hyper.m;
    if (!rep.epochs.empty()) {
      const EpochMetrics& last = rep.epochs.back();
      row.final_primal = last.primal_objective;
      row.final_gap = last.duality_gap;
      row.final_density = last.update_density;
      row.final_subspace_error = last.subspace_error;
    }
    row.oracle_distance = rep.verification.oracle_distance;
    row.span_residual = rep.verification.span_residual;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SummaryRow& a_, const SummaryRow& b_) {
                     if (a_.model != b_.model) return a_.model < b_.model;
                     return a_.seed < b_.seed;
                   });

  std::string content;
  if (a.format == "csv") {
    auto cell = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string();
    };
    content =
        "model,seed,epochs,eta,lambda,kappa,m,final_primal_objective,"
        "final_duality_gap,final_update_density,final_subspace_error,"
        "oracle_distance,span_residual\r\n";
    for (const SummaryRow& r : rows) {
      content += r.model;
      content += ',' + std::to_string(r.seed);
      content += ',' + std::to_string(r.epochs);
      content += ',' + format_double(r.eta);
      content += ',' + cell(r.lambda);
      content += ',' + cell(r.kappa);
      content += ',';
      if (r.m) content += std::to_string(*r.m);
      content += ',' + cell(r.final_primal);
      content += ',' + cell(r.final_gap);
      content += ',' + cell(r.final_density);
      content += ',' + cell(r.final_subspace_error);
      content += ',' + cell(r.oracle_distance);
      content += ',' + cell(r.span_residual);
      content += "\r\n";
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    auto opt = [](const std::optional<double>& v) {
      return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    for (const SummaryRow& r : rows) {
      nlohmann::json j;
      j["model"] = r.model;
      j["seed"] = r.seed;
      j["epochs"] = r.epochs;
      j["eta"] = r.eta;
      j["lambda"] = opt(r.lambda);
      j["kappa"] = opt(r.kappa);
      j["m"] = r.m ? nlohmann::json(*r.m) : nlohmann::json(nullptr);
      j["final_primal_objective"] = opt(r.final_primal);
      j["final_duality_gap"] = opt(r.final_gap);
      j["final_update_density"] = opt(r.final_density);
      j["final_subspace_error"] = opt(r.final_subspace_error);
      j["oracle_distance"] = opt(r.oracle_distance);
      j["span_residual"] = opt(r.span_residual);
      arr.push_back(std::move(j));
    }
    content = arr.dump();
  }
  write_file_atomic(a.out, content);
  std::cout << "merged " << rows.size() << " reports -> " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primal-dual online learners: datasets, training runs, oracle checks"};
  app.set_version_flag("--version", std::string("hebbdual ") + kToolVersion);
  app.require_subcommand(1);

  GenArgs g;
  CLI::App* gen = app.add_subcommand("gen", "generate a dataset JSON file");
  gen->add_option("--kind", g.kind, "dataset family")
      ->required()
      ->check(CLI::IsMember({"regression", "classification", "spiked"}));
  gen->add_option("--n", g.n, "feature dimension")->required();
  gen->add_option("--t", g.t, "sample count");
  gen->add_option("--seed", g.seed, "generator seed");
  gen->add_option("--noise", g.noise, "regression label noise");
  gen->add_flag("--positive-w", g.positive_w, "regression: strictly positive true weights");
  gen->add_option("--margin", g.margin, "classification margin");
  gen->add_option("--m", g.m, "spiked subspace dimension");
  gen->add_option("--gap", g.gap, "spiked variance ratio");
  gen->add_option("-o,--out", g.out, "output path")->required();

  TrainArgs t;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model, write report JSON and CSV");
  train_cmd->add_option("--model", t.model, "learner")
      ->required()
      ->check(CLI::IsMember({"ridge", "svm", "logistic", "expgrad", "sm"}));
  train_cmd->add_option("--data", t.data, "dataset JSON path")->required();
  train_cmd->add_option("-o,--out", t.out, "report JSON path")->required();
  train_cmd->add_option("--epochs", t.epochs, "full sweeps over the data");
  train_cmd->add_option("--eta", t.eta, "learning rate");
  train_cmd->add_option("--schedule", t.schedule, "learning-rate schedule")
      ->check(CLI::IsMember({"constant", "inverse-time"}));
  train_cmd->add_option("--decay", t.decay, "inverse-time decay rate");
  train_cmd->add_option("--seed", t.seed, "learner seed (filter initialization)");
  CLI::Option* lambda_opt =
      train_cmd->add_option("--lambda", "regularization strength for objectives");
  train_cmd->add_option("--kappa", t.kappa, "svm margin softness");
  train_cmd->add_option("--mu-scale", t.mu_scale, "expgrad uniform prior scale");
  train_cmd->add_flag("--normalize", t.normalize, "expgrad: renormalize to the prior simplex");
  train_cmd->add_option("--m", t.m, "sm output dimension");
  CLI::Option* eta_m_opt =
      train_cmd->add_option("--eta-m", "sm lateral learning rate (default: --eta)");

  VerifyArgs v;
  CLI::App* verify = app.add_subcommand("verify", "recompute oracle checks for a report");
  verify->add_option("--data", v.data, "dataset JSON path")->required();
  verify->add_option("--report", v.report, "report JSON path")->required();
  verify->add_option("--tol-weights", v.tol_weights, "weight distance tolerance");
  verify->add_option("--tol-gap", v.tol_gap, "duality gap tolerance");
  verify->add_option("--tol-identity", v.tol_identity, "dual stationarity tolerance");
  verify->add_option("--tol-fixed-point", v.tol_fixed_point, "activity identity tolerance");
  verify->add_option("--tol-kkt", v.tol_kkt, "batch dual KKT tolerance");
  verify->add_option("--tol-span", v.tol_span, "sample span residual tolerance");
  verify->add_option("--tol-subspace", v.tol_subspace, "subspace error tolerance");
  verify->add_option("--tol-mse", v.tol_mse, "expgrad final MSE tolerance");

  ReportArgs r;
  CLI::App* report = app.add_subcommand("report", "merge run reports into a summary table");
  report->add_option("inputs", r.inputs, "report JSON paths")->required();
  report->add_option("-o,--out", r.out, "summary output path")->required();
  report->add_option("--format", r.format, "summary format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (lambda_opt->count()) t.lambda = lambda_opt->as<double>();
  if (eta_m_opt->count()) t.eta_m = eta_m_opt->as<double>();

  try {
    if (gen->parsed()) return run_gen(g);
    if (train_cmd->parsed()) return run_train(t);
    if (verify->parsed()) return run_verify(v);
    if (report->parsed()) return run_report(r);
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
