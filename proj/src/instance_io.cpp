#include "trolink/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace trolink::io {
namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw InvalidInput(field + ": " + what);
}

double finite_number(const Json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(field, "not finite");
  return v;
}

Index positive_dim(const Json& obj, const char* name) {
  if (!obj.contains(name)) bad(name, "missing");
  const Json& j = obj.at(name);
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    bad(name, "expected a positive integer");
  }
  return static_cast<Index>(j.get<long long>());
}

std::vector<ComplexMatrix> matrix_list(const Json& obj, const char* name,
                                       Index rows, Index cols, bool required) {
  std::vector<ComplexMatrix> out;
  if (!obj.contains(name)) {
    if (required) bad(name, "missing");
    return out;
  }
  const Json& j = obj.at(name);
  if (!j.is_array()) bad(name, "expected a list of matrices");
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string field = std::string(name) + "[" + std::to_string(k) + "]";
    ComplexMatrix m = matrix_from_json(j[k], field);
    if (m.rows() != rows || m.cols() != cols) {
      bad(field, "expected a " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    out.push_back(std::move(m));
  }
  return out;
}

ComplexMatrix coefficient_matrix(const Json& obj, const std::string& name,
                                 Index rows, Index cols) {
  ComplexMatrix m = matrix_from_json(obj.at(name), name);
  // An empty list of rows stands for any matrix with no rows.
  if (rows == 0 && m.rows() == 0) return ComplexMatrix(0, cols);
  if (m.rows() != rows || m.cols() != cols) {
    bad(name, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " coefficients, got " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
  }
  return m;
}

ComplexMatrix stack(const std::vector<ComplexMatrix>& list, Index rows,
                    Index cols) {
  ComplexMatrix out(rows * cols, static_cast<Index>(list.size()));
  for (std::size_t j = 0; j < list.size(); ++j) {
    out.col(static_cast<Index>(j)) = mats::vectorize(list[j]);
  }
  return out;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) bad(field, "expected a matrix (array of rows)");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return ComplexMatrix(0, 0);
  if (!j[0].is_array()) bad(field + "[0]", "expected a row (array of scalars)");
  const Index cols = static_cast<Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    const Json& row = j[i];
    if (!row.is_array()) bad(rf, "expected a row (array of scalars)");
    if (static_cast<Index>(row.size()) != cols) {
      bad(rf, "row has " + std::to_string(row.size()) + " entries, expected " +
                  std::to_string(cols));
    }
    for (Index k = 0; k < cols; ++k) {
      const std::string ef = rf + "[" + std::to_string(k) + "]";
      const Json& z = row[k];
      if (!z.is_array() || z.size() != 2) bad(ef, "expected [re, im]");
      m(i, k) = Complex(finite_number(z[0], ef), finite_number(z[1], ef));
    }
  }
  return m;
}

InstanceFile parse_instance(const std::string& text) {
  Json obj;
  try {
    obj = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("instance file: not valid JSON (") +
                       e.what() + ")");
  }
  if (!obj.is_object()) bad("instance file", "top level must be an object");

  InstanceFile f;
  f.dim_k = positive_dim(obj, "dim_k");
  f.dim_h = positive_dim(obj, "dim_h");
  f.t_basis = matrix_list(obj, "T_basis", f.dim_k, f.dim_h, true);
  f.x_basis = matrix_list(obj, "X_basis", f.dim_k, f.dim_h, false);
  const Index nt = static_cast<Index>(f.t_basis.size());
  const Index nx = static_cast<Index>(f.x_basis.size());
  if (nt == 0) bad("T_basis", "must contain at least one matrix");

  if (obj.contains("P_coeffs")) {
    f.p_coeffs = coefficient_matrix(obj, "P_coeffs", nx, nt);
  }
  if (obj.contains("E_blocks")) {
    const Json& e = obj.at("E_blocks");
    if (!e.is_object()) bad("E_blocks", "expected an object");
    for (const char* key : {"e11", "e12", "e21", "e22"}) {
      if (!e.contains(key)) bad(std::string("E_blocks.") + key, "missing");
    }
    Json flat = Json::object();
    for (auto it = e.begin(); it != e.end(); ++it) {
      flat["E_blocks." + it.key()] = it.value();
    }
    f.e_blocks = EBlocks{coefficient_matrix(flat, "E_blocks.e11", nx * nx, nt * nt),
                         coefficient_matrix(flat, "E_blocks.e12", nx, nt),
                         coefficient_matrix(flat, "E_blocks.e21", nx, nt),
                         coefficient_matrix(flat, "E_blocks.e22", nx * nx, nt * nt)};
  }
  if (obj.contains("tolerances")) {
    const Json& t = obj.at("tolerances");
    if (!t.is_object()) bad("tolerances", "expected an object");
    ToleranceProfile tol;
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string field = "tolerances." + it.key();
      const double v = finite_number(it.value(), field);
      if (it.key() == "rank_cut") tol.rank_cut = v;
      else if (it.key() == "residual") tol.residual = v;
      else if (it.key() == "ortho") tol.ortho = v;
      else bad(field, "unknown tolerance");
    }
    try {
      tol.validate();
    } catch (const InvalidInput& e) {
      bad("tolerances", e.what());
    }
    f.tolerances = tol;
  }
  if (obj.contains("seed")) {
    const Json& s = obj.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0)) {
      bad("seed", "expected a non-negative integer");
    }
    f.seed = s.get<std::uint64_t>();
  }
  return f;
}

InstanceFile read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

Json instance_to_json(const InstanceFile& f) {
  Json obj = Json::object();
  obj["dim_k"] = f.dim_k;
  obj["dim_h"] = f.dim_h;
  auto list = [](const std::vector<ComplexMatrix>& l) {
    Json a = Json::array();
    for (const auto& m : l) a.push_back(matrix_to_json(m));
    return a;
  };
  obj["T_basis"] = list(f.t_basis);
  obj["X_basis"] = list(f.x_basis);
  if (f.p_coeffs) obj["P_coeffs"] = matrix_to_json(*f.p_coeffs);
  if (f.e_blocks) {
    obj["E_blocks"] = Json{{"e11", matrix_to_json(f.e_blocks->e11)},
                           {"e12", matrix_to_json(f.e_blocks->e12)},
                           {"e21", matrix_to_json(f.e_blocks->e21)},
                           {"e22", matrix_to_json(f.e_blocks->e22)}};
  }
  if (f.tolerances) {
    obj["tolerances"] = Json{{"rank_cut", f.tolerances->rank_cut},
                             {"residual", f.tolerances->residual},
                             {"ortho", f.tolerances->ortho}};
  }
  if (f.seed) obj["seed"] = *f.seed;
  return obj;
}

std::string write_instance(const InstanceFile& f) {
  return instance_to_json(f).dump(2) + "\n";
}

ProductLists product_lists(const std::vector<ComplexMatrix>& list) {
  ProductLists out;
  for (const auto& a : list) {
    for (const auto& b : list) {
      out.left.push_back(a * b.adjoint());
      out.right.push_back(a.adjoint() * b);
    }
    out.adj.push_back(a.adjoint());
  }
  return out;
}

TroMap map_from_spanning(const std::vector<ComplexMatrix>& source_list,
                         const std::vector<ComplexMatrix>& target_list,
                         const ComplexMatrix& coeffs,
                         const mats::SubspaceBasis& source,
                         const mats::SubspaceBasis& target,
                         const std::string& field) {
  const Index k = static_cast<Index>(source_list.size());
  const Index l = static_cast<Index>(target_list.size());
  if (coeffs.cols() != k || (coeffs.rows() != l && !(l == 0 && coeffs.rows() == 0))) {
    bad(field, "expected " + std::to_string(l) + "x" + std::to_string(k) +
                   " coefficients");
  }
  const auto& tol = source.tol();
  const Index rows = source.rows();
  const Index cols = source.cols();
  if (source.dim() == 0) return TroMap(source, target, ComplexMatrix(target.dim(), 0));
  if (k == 0) bad(field, "source list is empty");

  const mats::Decomposer dec(rows, cols, stack(source_list, rows, cols), tol);
  // Images of the listed source elements.
  const ComplexMatrix listed =
      l == 0 ? ComplexMatrix(ComplexMatrix::Zero(target.ambient_size(), k))
             : ComplexMatrix(stack(target_list, target.rows(), target.cols()) * coeffs);
  if (dec.kernel().cols() > 0) {
    const ComplexMatrix leak = listed * dec.kernel();
    const double scale = std::max(1.0, listed.norm());
    if (leak.norm() > tol.residual * scale) {
      bad(field, "coefficients are inconsistent on the linearly dependent "
                 "source list");
    }
  }
  Eigen::VectorXd residuals;
  const ComplexMatrix alpha = dec.solve_columns(source.columns(), residuals);
  if (residuals.size() && residuals.maxCoeff() > tol.residual) {
    bad(field, "source list does not span the source space");
  }
  const ComplexMatrix images = listed * alpha;
  if (target.dim() == 0) {
    if (images.norm() > tol.residual) bad(field, "nonzero image in zero target");
    return TroMap(source, target, ComplexMatrix(0, source.dim()));
  }
  return TroMap(source, target, target.columns().adjoint() * images);
}

ComplexMatrix coeffs_against(const TroMap& m,
                             const std::vector<ComplexMatrix>& source_list,
                             const std::vector<ComplexMatrix>& target_list) {
  const Index k = static_cast<Index>(source_list.size());
  const Index l = static_cast<Index>(target_list.size());
  ComplexMatrix out = ComplexMatrix::Zero(l, k);
  if (l == 0 || k == 0) return out;
  const auto& tgt = m.target();
  const mats::Decomposer dec(tgt.rows(), tgt.cols(),
                             stack(target_list, tgt.rows(), tgt.cols()),
                             tgt.tol());
  for (Index j = 0; j < k; ++j) out.col(j) = dec.solve(m.apply(source_list[j]));
  return out;
}

Loaded load(const InstanceFile& f, const ToleranceProfile& tol) {
  const Index m = f.dim_k;
  const Index n = f.dim_h;
  Loaded out{tro::Tro::unvalidated(mats::orthonormal_basis(m, n, f.t_basis, tol)),
             tro::Tro::unvalidated(mats::orthonormal_basis(m, n, f.x_basis, tol)),
             std::nullopt, std::nullopt};
  if (f.p_coeffs) {
    out.p = map_from_spanning(f.t_basis, f.x_basis, *f.p_coeffs,
                              out.t.space(), out.x.space(), "P_coeffs");
  }
  if (f.e_blocks) {
    const ProductLists tl = product_lists(f.t_basis);
    const ProductLists xl = product_lists(f.x_basis);
    const auto tb = mats::orthonormal_basis(m, m, tl.left, tol);
    const auto xb = mats::orthonormal_basis(m, m, xl.left, tol);
    const auto td = mats::orthonormal_basis(n, n, tl.right, tol);
    const auto xd = mats::orthonormal_basis(n, n, xl.right, tol);
    out.e = expectation::BlockExpectation{
        m,
        n,
        map_from_spanning(tl.left, xl.left, f.e_blocks->e11, tb, xb,
                          "E_blocks.e11"),
        map_from_spanning(f.t_basis, f.x_basis, f.e_blocks->e12, out.t.space(),
                          out.x.space(), "E_blocks.e12"),
        map_from_spanning(tl.adj, xl.adj, f.e_blocks->e21,
                          out.t.space().adjoint(), out.x.space().adjoint(),
                          "E_blocks.e21"),
        map_from_spanning(tl.right, xl.right, f.e_blocks->e22, td, xd,
                          "E_blocks.e22")};
  }
  return out;
}

InstanceFile from_instance(const gen::Instance& inst) {
  InstanceFile f;
  f.dim_k = inst.t.dim_k();
  f.dim_h = inst.t.dim_h();
  f.t_basis = inst.t.space().elements();
  f.x_basis = inst.x.space().elements();
  f.p_coeffs = coeffs_against(inst.p, f.t_basis, f.x_basis);
  f.seed = inst.seed;
  return f;
}

EBlocks e_blocks_of(const expectation::BlockExpectation& e,
                    const std::vector<ComplexMatrix>& t_list,
                    const std::vector<ComplexMatrix>& x_list) {
  const ProductLists tl = product_lists(t_list);
  const ProductLists xl = product_lists(x_list);
  return {coeffs_against(e.e11, tl.left, xl.left),
          coeffs_against(e.e12, t_list, x_list),
          coeffs_against(e.e21, tl.adj, xl.adj),
          coeffs_against(e.e22, tl.right, xl.right)};
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace trolink::io
