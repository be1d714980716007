#include "heatsift/linalg.hpp"

#include <Eigen/Dense>

#include "heatsift/errors.hpp"

namespace heatsift::linalg {

EigenDecomposition symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("symmetric_eigen: matrix is not square");
  const auto n = static_cast<Eigen::Index>(a.rows());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> m(a.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric_eigen: eigendecomposition did not converge");

  EigenDecomposition out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  out.vectors = Matrix(a.rows(), a.rows());
  const auto& v = solver.eigenvectors();  // column k = eigenvector k
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      out.vectors(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) = v(i, k);
  return out;
}

}  // namespace heatsift::linalg
