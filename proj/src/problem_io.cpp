#include "asdp/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace asdp {
namespace {

using nlohmann::json;

Vector<double> to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  Vector<double> v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError(std::string(what) + " must hold numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

json from_vector(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

SparseMatrix<double> to_sparse(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
    throw FormatError(std::string(what) + " needs rows and cols");
  const auto rows = j.at("rows").get<long long>();
  const auto cols = j.at("cols").get<long long>();
  if (rows < 0 || cols < 0) throw FormatError(std::string(what) + " has negative dimensions");
  std::vector<Eigen::Triplet<double, int>> trips;
  if (j.contains("entries")) {
    for (const auto& e : j.at("entries")) {
      if (!e.is_array() || e.size() != 3) throw FormatError(std::string(what) + " entries must be [i, j, v]");
      const auto r = e[0].get<long long>();
      const auto c = e[1].get<long long>();
      if (r < 0 || r >= rows || c < 0 || c >= cols) throw FormatError(std::string(what) + " entry out of range");
      trips.emplace_back(static_cast<int>(r), static_cast<int>(c), e[2].get<double>());
    }
  }
  SparseMatrix<double> m(static_cast<Index>(rows), static_cast<Index>(cols));
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

json from_sparse(const SparseMatrix<double>& m) {
  json entries = json::array();
  for (Index j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix<double>::InnerIterator it(m, j); it; ++it)
      entries.push_back({it.row(), it.col(), it.value()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

}  // namespace

ConicProblem<double> parse_problem_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("problem json: ") + e.what());
  }
  try {
    ConicProblem<double> prob;
    prob.q = to_vector(doc.at("q"), "q");
    const Index k = prob.q.size();
    prob.A = to_sparse(doc.at("A"), "A");
    if (doc.contains("P"))
      prob.P = to_sparse(doc.at("P"), "P");
    else
      prob.P.resize(k, k);
    for (const auto& c : doc.at("cones")) {
      const std::string kind = c.at("kind").get<std::string>();
      if (kind == "zero" || kind == "nonnegative") {
        Vector<double> b = c.contains("b") ? to_vector(c.at("b"), "b") : Vector<double>::Zero(c.at("dim").get<Index>());
        if (kind == "zero")
          prob.cones.add_zero(b);
        else
          prob.cones.add_nonnegative(b);
      } else if (kind == "psd") {
        const Index n = c.at("n").get<Index>();
        if (c.contains("b"))
          prob.cones.add_psd(n, to_vector(c.at("b"), "b"));
        else
          prob.cones.add_psd(n);
      } else {
        throw FormatError("unknown cone kind '" + kind + "'");
      }
    }
    prob.objective_scale = doc.value("objective_scale", 1.0);
    prob.objective_offset = doc.value("objective_offset", 0.0);
    return prob;
  } catch (const json::exception& e) {
    throw FormatError(std::string("problem json: ") + e.what());
  }
}

ConicProblem<double> read_problem_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_json(ss.str());
}

std::string write_problem_json(const ConicProblem<double>& prob) {
  json cones = json::array();
  for (const auto& blk : prob.cones.blocks()) {
    json c = {{"kind", to_string(blk.kind)}, {"b", from_vector(blk.b)}};
    if (blk.kind == ConeKind::PsdTriangle) c["n"] = blk.matrix_dim;
    cones.push_back(c);
  }
  json doc = {{"q", from_vector(prob.q)},
              {"A", from_sparse(prob.A)},
              {"P", from_sparse(prob.P)},
              {"cones", cones},
              {"objective_scale", prob.objective_scale},
              {"objective_offset", prob.objective_offset}};
  return doc.dump(2) + "\n";
}

std::string result_to_json(const SolveResult<double>& result, const Settings& settings, const std::string& name,
                           const ResultDumpOptions& options) {
  json doc;
  doc["name"] = name;
  doc["status"] = to_string(result.status);
  doc["objective"] = result.objective;
  doc["iterations"] = result.iterations;
  doc["r_prim"] = result.r_prim;
  doc["r_dual"] = result.r_dual;
  doc["rank"] = result.final_ritz_count;
  doc["projection_fallbacks"] = result.projection_fallbacks;
  if (result.primal_certificate) {
    const auto& c = *result.primal_certificate;
    doc["certificate"] = {{"kind", "primal_infeasible"},
                          {"y_bar", from_vector(c.y_bar)},
                          {"at_y_norm_inf", c.at_y_norm},
                          {"dist_polar", c.dist_polar},
                          {"b_dot_y", c.b_dot_y}};
  } else if (result.dual_certificate) {
    const auto& c = *result.dual_certificate;
    doc["certificate"] = {{"kind", "dual_infeasible"},
                          {"x_bar", from_vector(c.x_bar)},
                          {"dist_recession", c.dist_recession},
                          {"px_norm_inf", c.px_norm},
                          {"q_dot_x", c.q_dot_x}};
  } else {
    doc["certificate"] = nullptr;
  }
  if (result.primal_certificate && result.dual_certificate) {
    const auto& c = *result.dual_certificate;
    doc["dual_certificate"] = {{"x_bar", from_vector(c.x_bar)},
                               {"dist_recession", c.dist_recession},
                               {"px_norm_inf", c.px_norm},
                               {"q_dot_x", c.q_dot_x}};
  }
  if (options.include_solution) {
    doc["x"] = from_vector(result.x);
    doc["z"] = from_vector(result.z);
    doc["y"] = from_vector(result.y);
  }
  if (options.include_timings) {
    doc["timings"] = {{"total", result.timings.total},
                      {"setup", result.timings.setup},
                      {"linsys", result.timings.linsys},
                      {"projection", result.timings.projection}};
  }
  doc["settings"] = {{"sigma", settings.sigma},
                     {"rho", settings.rho},
                     {"alpha", settings.alpha},
                     {"eps_abs", settings.eps_abs},
                     {"eps_rel", settings.eps_rel},
                     {"eps_pinf", settings.eps_pinf},
                     {"eps_dinf", settings.eps_dinf},
                     {"max_iter", settings.max_iter},
                     {"check_interval", settings.check_interval},
                     {"projection_mode", to_string(settings.projection_mode)},
                     {"proj_tol_c", settings.proj_tol_c},
                     {"proj_tol_exponent", settings.proj_tol_exponent},
                     {"linsys_backend", to_string(settings.linsys_backend)},
                     {"cg_tol_c", settings.cg_tol_c},
                     {"seed", settings.seed}};
  return doc.dump(2) + "\n";
}

}  // namespace asdp
