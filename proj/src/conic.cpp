// SPDX-License-Identifier: Apache-2.0

#include "fdpa/conic.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdpa {

const char* row_kind_name(RowKind kind) {
  switch (kind) {
    case RowKind::qos_dl: return "C1";
    case RowKind::qos_ul: return "C2";
    case RowKind::tcheby: return "C6";
  }
  return "?";
}

static RowKind row_kind_from_name(const std::string& s) {
  if (s == "C1") return RowKind::qos_dl;
  if (s == "C2") return RowKind::qos_ul;
  if (s == "C6") return RowKind::tcheby;
  throw std::runtime_error("unknown row kind '" + s + "'");
}

double herm_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

double row_lhs(const ConstraintRow& row, const std::vector<Eigen::MatrixXcd>& w,
               const Eigen::VectorXd& p, double t) {
  double v = row.t_coeff * t;
  for (std::size_t k = 0; k < row.w_coeff.size(); ++k)
    v += herm_inner(row.w_coeff[k], w[k]);
  if (p.size() > 0) v += row.p_coeff.dot(p);
  return v;
}

double row_residual_unscaled(const ConstraintRow& row,
                             const std::vector<Eigen::MatrixXcd>& w,
                             const Eigen::VectorXd& p, double t) {
  return row.scale * (row_lhs(row, w, p, t) - row.rhs);
}

double objective_value(const ConicProblem& prob,
                       const std::vector<Eigen::MatrixXcd>& w,
                       const Eigen::VectorXd& p, double t) {
  double v = prob.obj_t * t;
  for (std::size_t k = 0; k < prob.obj_w.size(); ++k)
    v += herm_inner(prob.obj_w[k], w[k]);
  if (p.size() > 0) v += prob.obj_p.dot(p);
  return v;
}

namespace {

void write_mat(std::ostream& os, const std::string& tag, int block,
               const Eigen::MatrixXcd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != std::complex<double>(0.0, 0.0))
        os << tag << " " << block << " " << r << " " << c << " "
           << m(r, c).real() << " " << m(r, c).imag() << "\n";
}

void write_vec(std::ostream& os, const std::string& tag, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) os << tag << " " << i << " " << v(i) << "\n";
}

}  // namespace

void save_problem(std::ostream& os, const ConicProblem& prob) {
  os.precision(17);
  os << "fdpa-conic-v1\n";
  os << "dims " << prob.nt << " " << prob.num_dl << " " << prob.num_ul << " "
     << (prob.has_t ? 1 : 0) << " " << prob.rows.size() << "\n";
  os << "lambda " << prob.lambda(0) << " " << prob.lambda(1) << "\n";
  os << "qstar " << prob.q_star(0) << " " << prob.q_star(1) << "\n";
  write_vec(os, "gamma_dl", prob.gamma_dl);
  write_vec(os, "gamma_ul", prob.gamma_ul);
  for (int k = 0; k < prob.num_dl; ++k)
    write_mat(os, "hmat", k, prob.h_outer[static_cast<std::size_t>(k)]);
  for (int j = 0; j < prob.num_ul; ++j)
    write_mat(os, "simat", j, prob.si_outer[static_cast<std::size_t>(j)]);
  for (int k = 0; k < prob.num_dl; ++k)
    write_mat(os, "obj_w", k, prob.obj_w[static_cast<std::size_t>(k)]);
  write_vec(os, "obj_p", prob.obj_p);
  if (prob.obj_t != 0.0) os << "obj_t " << prob.obj_t << "\n";
  for (std::size_t i = 0; i < prob.rows.size(); ++i) {
    const ConstraintRow& row = prob.rows[i];
    os << "row " << i << " " << row_kind_name(row.kind) << " " << row.index
       << " " << row.rhs << " " << row.scale << " " << row.t_coeff << "\n";
    for (int k = 0; k < prob.num_dl; ++k) {
      std::ostringstream tag;
      tag << "coef_w " << i;
      write_mat(os, tag.str(), k, row.w_coeff[static_cast<std::size_t>(k)]);
    }
    for (Eigen::Index j = 0; j < row.p_coeff.size(); ++j)
      if (row.p_coeff(j) != 0.0)
        os << "coef_p " << i << " " << j << " " << row.p_coeff(j) << "\n";
  }
  os << "end\n";
}

ConicProblem load_problem(std::istream& is) {
  ConicProblem prob;
  std::string line;
  if (!std::getline(is, line) || line != "fdpa-conic-v1")
    throw std::runtime_error("load_problem: bad header");
  std::size_t num_rows = 0;
  auto need_row = [&](std::size_t i) -> ConstraintRow& {
    if (i >= prob.rows.size()) throw std::runtime_error("row index out of order");
    return prob.rows[i];
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "end") break;
    if (tag == "dims") {
      int has_t = 0;
      ss >> prob.nt >> prob.num_dl >> prob.num_ul >> has_t >> num_rows;
      prob.has_t = has_t != 0;
      auto zero = Eigen::MatrixXcd::Zero(prob.nt, prob.nt);
      prob.obj_w.assign(static_cast<std::size_t>(prob.num_dl), zero);
      prob.h_outer.assign(static_cast<std::size_t>(prob.num_dl), zero);
      prob.si_outer.assign(static_cast<std::size_t>(prob.num_ul), zero);
      prob.obj_p = Eigen::VectorXd::Zero(prob.num_ul);
      prob.gamma_dl = Eigen::VectorXd::Zero(prob.num_dl);
      prob.gamma_ul = Eigen::VectorXd::Zero(prob.num_ul);
    } else if (tag == "lambda") {
      ss >> prob.lambda(0) >> prob.lambda(1);
    } else if (tag == "qstar") {
      ss >> prob.q_star(0) >> prob.q_star(1);
    } else if (tag == "gamma_dl" || tag == "gamma_ul" || tag == "obj_p") {
      int i;
      double v;
      ss >> i >> v;
      (tag == "gamma_dl" ? prob.gamma_dl
                         : (tag == "gamma_ul" ? prob.gamma_ul : prob.obj_p))(i) = v;
    } else if (tag == "hmat" || tag == "simat" || tag == "obj_w") {
      int b, r, c;
      double re, im;
      ss >> b >> r >> c >> re >> im;
      auto& dst = (tag == "hmat" ? prob.h_outer
                                 : (tag == "simat" ? prob.si_outer : prob.obj_w));
      dst[static_cast<std::size_t>(b)](r, c) = {re, im};
    } else if (tag == "obj_t") {
      ss >> prob.obj_t;
    } else if (tag == "row") {
      std::size_t i;
      std::string kind;
      ConstraintRow row;
      ss >> i >> kind >> row.index >> row.rhs >> row.scale >> row.t_coeff;
      row.kind = row_kind_from_name(kind);
      row.w_coeff.assign(static_cast<std::size_t>(prob.num_dl),
                         Eigen::MatrixXcd::Zero(prob.nt, prob.nt));
      row.p_coeff = Eigen::VectorXd::Zero(prob.num_ul);
      if (i != prob.rows.size())
        throw std::runtime_error("load_problem: rows out of order");
      prob.rows.push_back(std::move(row));
    } else if (tag == "coef_w") {
      std::size_t i;
      int b, r, c;
      double re, im;
      ss >> i >> b >> r >> c >> re >> im;
      need_row(i).w_coeff[static_cast<std::size_t>(b)](r, c) = {re, im};
    } else if (tag == "coef_p") {
      std::size_t i;
      int j;
      double v;
      ss >> i >> j >> v;
      need_row(i).p_coeff(j) = v;
    } else {
      throw std::runtime_error("load_problem: unknown tag '" + tag + "'");
    }
    if (!ss) throw std::runtime_error("load_problem: malformed line '" + line + "'");
  }
  if (prob.rows.size() != num_rows)
    throw std::runtime_error("load_problem: row count mismatch");
  return prob;
}

void save_problem_file(const std::string& path, const ConicProblem& prob) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save_problem(os, prob);
}

ConicProblem load_problem_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return load_problem(is);
}

}  // namespace fdpa
