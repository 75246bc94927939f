#include "hebbdual/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

#include "hebbdual/errors.hpp"

namespace hebbdual {

using nlohmann::json;

namespace {

json to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> opt_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<std::size_t> opt_size(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::size_t>();
}

json mat_rows_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
  return rows;
}

Mat mat_from_json_rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::runtime_error(std::string(what) + ": expected a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = j.at(i).get<Vec>();
    if (row.size() != cols)
      throw std::runtime_error(std::string(what) + ": ragged rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = row[k];
  }
  return m;
}

// columns serialized as a list of vectors
json basis_to_json(const Mat& b) {
  json cols = json::array();
  for (std::size_t j = 0; j < b.cols(); ++j) cols.push_back(b.col(j));
  return cols;
}

Mat basis_from_json(const json& j, const char* what) {
  const Mat by_rows = mat_from_json_rows(j, what);  // list of columns
  Mat b(by_rows.cols(), by_rows.rows());
  for (std::size_t c = 0; c < by_rows.rows(); ++c)
    for (std::size_t i = 0; i < by_rows.cols(); ++i) b(i, c) = by_rows(c, i);
  return b;
}

json meta_to_json(const DatasetMeta& meta) {
  json j;
  j["kind"] = meta.kind;
  j["n"] = meta.n;
  j["t"] = meta.t;
  j["seed"] = meta.seed;
  j["noise"] = to_json(meta.noise);
  j["positive_w"] = meta.positive_w ? json(*meta.positive_w) : json(nullptr);
  j["margin"] = to_json(meta.margin);
  j["m"] = meta.m ? json(*meta.m) : json(nullptr);
  j["gap"] = to_json(meta.gap);
  return j;
}

DatasetMeta meta_from_json(const json& j) {
  DatasetMeta meta;
  meta.kind = j.at("kind").get<std::string>();
  meta.n = j.at("n").get<std::size_t>();
  meta.t = j.at("t").get<std::size_t>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.noise = opt_double(j, "noise");
  if (j.contains("positive_w") && !j.at("positive_w").is_null())
    meta.positive_w = j.at("positive_w").get<bool>();
  meta.margin = opt_double(j, "margin");
  meta.m = opt_size(j, "m");
  meta.gap = opt_double(j, "gap");
  return meta;
}

}  // namespace

std::string dataset_to_json(const Dataset& d) {
  json j;
  j["meta"] = meta_to_json(d.meta);
  json x = json::array();
  for (const Vec& xt : d.x) x.push_back(xt);
  j["x"] = std::move(x);
  j["y"] = d.y ? json(*d.y) : json(nullptr);
  if (d.truth) {
    json t;
    t["w"] = d.truth->w ? json(*d.truth->w) : json(nullptr);
    t["margin"] = to_json(d.truth->margin);
    t["basis"] = d.truth->basis ? basis_to_json(*d.truth->basis) : json(nullptr);
    j["truth"] = std::move(t);
  } else {
    j["truth"] = nullptr;
  }
  return j.dump();
}

Dataset dataset_from_json(const std::string& text) {
  const json j = json::parse(text);
  Dataset d;
  d.meta = meta_from_json(j.at("meta"));
  const json& jx = j.at("x");
  if (!jx.is_array() || jx.empty())
    throw std::runtime_error("dataset: 'x' must be a nonempty array of samples");
  d.x.reserve(jx.size());
  for (const auto& row : jx) d.x.push_back(row.get<Vec>());
  const std::size_t n = d.x.front().size();
  for (const Vec& xt : d.x)
    if (xt.size() != n) throw std::runtime_error("dataset: ragged samples");
  if (j.contains("y") && !j.at("y").is_null()) {
    d.y = j.at("y").get<Vec>();
    if (d.y->size() != d.x.size())
      throw std::runtime_error("dataset: 'y' length does not match sample count");
  }
  if (j.contains("truth") && !j.at("truth").is_null()) {
    const json& jt = j.at("truth");
    DatasetTruth truth;
    if (jt.contains("w") && !jt.at("w").is_null()) truth.w = jt.at("w").get<Vec>();
    truth.margin = opt_double(jt, "margin");
    if (jt.contains("basis") && !jt.at("basis").is_null())
      truth.basis = basis_from_json(jt.at("basis"), "dataset truth basis");
    d.truth = std::move(truth);
  }
  return d;
}

std::string report_to_json(const RunReport& r) {
  json j;
  j["model"] = r.model;
  json h;
  h["epochs"] = r.hyper.epochs;
  h["eta"] = r.hyper.eta;
  h["schedule"] = r.hyper.schedule;
  h["decay"] = r.hyper.decay;
  h["seed"] = r.hyper.seed;
  h["lambda"] = to_json(r.hyper.lambda);
  h["lambda_eff"] = to_json(r.hyper.lambda_eff);
  h["kappa"] = to_json(r.hyper.kappa);
  h["mu_scale"] = to_json(r.hyper.mu_scale);
  h["eta_m"] = to_json(r.hyper.eta_m);
  h["m"] = r.hyper.m ? json(*r.hyper.m) : json(nullptr);
  j["hyper"] = std::move(h);
  j["dataset_meta"] = meta_to_json(r.dataset_meta);
  j["tool_version"] = r.tool_version;
  json rows = json::array();
  for (const EpochMetrics& em : r.epochs) {
    json row;
    row["epoch"] = em.epoch;
    row["primal_objective"] = to_json(em.primal_objective);
    row["dual_objective"] = to_json(em.dual_objective);
    row["duality_gap"] = to_json(em.duality_gap);
    row["mean_update_norm"] = to_json(em.mean_update_norm);
    row["update_density"] = to_json(em.update_density);
    row["train_error"] = to_json(em.train_error);
    row["subspace_error"] = to_json(em.subspace_error);
    rows.push_back(std::move(row));
  }
  j["epochs"] = std::move(rows);
  j["final_w"] = r.final_w ? json(*r.final_w) : json(nullptr);
  j["final_W"] = r.final_W ? mat_rows_to_json(*r.final_W) : json(nullptr);
  j["final_M"] = r.final_M ? mat_rows_to_json(*r.final_M) : json(nullptr);
  j["dual_snapshot"] = r.dual_snapshot ? json(*r.dual_snapshot) : json(nullptr);
  json v;
  v["oracle_distance"] = to_json(r.verification.oracle_distance);
  v["span_residual"] = to_json(r.verification.span_residual);
  v["subspace_error"] = to_json(r.verification.subspace_error);
  v["fixed_point_residuals"] = to_json(r.verification.fixed_point_residuals);
  j["verification"] = std::move(v);
  return j.dump();
}

RunReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunReport r;
  r.model = j.at("model").get<std::string>();
  const json& h = j.at("hyper");
  r.hyper.epochs = h.at("epochs").get<int>();
  r.hyper.eta = h.at("eta").get<double>();
  r.hyper.schedule = h.at("schedule").get<std::string>();
  r.hyper.decay = h.at("decay").get<double>();
  r.hyper.seed = h.at("seed").get<std::uint64_t>();
  r.hyper.lambda = opt_double(h, "lambda");
  r.hyper.lambda_eff = opt_double(h, "lambda_eff");
  r.hyper.kappa = opt_double(h, "kappa");
  r.hyper.mu_scale = opt_double(h, "mu_scale");
  r.hyper.eta_m = opt_double(h, "eta_m");
  r.hyper.m = opt_size(h, "m");
  r.dataset_meta = meta_from_json(j.at("dataset_meta"));
  r.tool_version = j.at("tool_version").get<std::string>();
  for (const auto& row : j.at("epochs")) {
    EpochMetrics em;
    em.epoch = row.at("epoch").get<int>();
    em.primal_objective = opt_double(row, "primal_objective");
    em.dual_objective = opt_double(row, "dual_objective");
    em.duality_gap = opt_double(row, "duality_gap");
    em.mean_update_norm = opt_double(row, "mean_update_norm");
    em.update_density = opt_double(row, "update_density");
    em.train_error = opt_double(row, "train_error");
    em.subspace_error = opt_double(row, "subspace_error");
    r.epochs.push_back(em);
  }
  if (j.contains("final_w") && !j.at("final_w").is_null())
    r.final_w = j.at("final_w").get<Vec>();
  if (j.contains("final_W") && !j.at("final_W").is_null())
    r.final_W = mat_from_json_rows(j.at("final_W"), "report final_W");
  if (j.contains("final_M") && !j.at("final_M").is_null())
    r.final_M = mat_from_json_rows(j.at("final_M"), "report final_M");
  if (j.contains("dual_snapshot") && !j.at("dual_snapshot").is_null())
    r.dual_snapshot = j.at("dual_snapshot").get<Vec>();
  if (j.contains("verification") && !j.at("verification").is_null()) {
    const json& v = j.at("verification");
    r.verification.oracle_distance = opt_double(v, "oracle_distance");
    r.verification.span_residual = opt_double(v, "span_residual");
    r.verification.subspace_error = opt_double(v, "subspace_error");
    r.verification.fixed_point_residuals = opt_double(v, "fixed_point_residuals");
  }
  return r;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string report_to_csv(const RunReport& r) {
  std::string out =
      "epoch,primal_objective,dual_objective,duality_gap,"
      "mean_update_norm,update_density,train_error\r\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const EpochMetrics& em : r.epochs) {
    out += std::to_string(em.epoch);
    out += ',';
    out += cell(em.primal_objective);
    out += ',';
    out += cell(em.dual_objective);
    out += ',';
    out += cell(em.duality_gap);
    out += ',';
    out += cell(em.mean_update_norm);
    out += ',';
    out += cell(em.update_density);
    out += ',';
    out += cell(em.train_error);
    out += "\r\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed for '" + path.string() + "'");
  return content;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw std::runtime_error("cannot move '" + tmp.string() + "' to '" +
                             path.string() + "': " + ec.message());
}

}  // namespace hebbdual
