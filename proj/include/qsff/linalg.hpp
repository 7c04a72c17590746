// Dense complex-matrix kernels: unitarity checks, eigenphase extraction,
// SVD wrappers, and a scaling-and-squaring matrix exponential used as a
// cross-check oracle by the model layer.
#ifndef QSFF_LINALG_HPP
#define QSFF_LINALG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsff {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frobenius norm of M†M - 1.
inline double unitarity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("unitarity_defect: matrix must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    ComplexMatrix g = m.adjoint() * m;
    g.diagonal().array() -= Complex(1.0, 0.0);
    return g.norm();
}

// A square matrix certified unitary at construction.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(ComplexMatrix m) : inner_(std::move(m)) {
        defect_ = unitarity_defect(inner_);
        const double tol = 1e-10 * static_cast<double>(inner_.rows());
        if (defect_ > tol)
            throw NumericalError("UnitaryMatrix: unitarity defect " + std::to_string(defect_) +
                                 " exceeds " + std::to_string(tol));
        if (!inner_.allFinite())
            throw NumericalError("UnitaryMatrix: non-finite entries");
    }

    const ComplexMatrix& matrix() const { return inner_; }
    Eigen::Index dim() const { return inner_.rows(); }
    double defect() const { return defect_; }

  private:
    ComplexMatrix inner_;
    double defect_ = 0.0;
};

// Eigenphases of a unitary, in (-pi, pi], together with the unitary frame V
// such that U = V diag(e^{i theta}) V†.
struct EigenphaseSpectrum {
    RealVector phases;
    ComplexMatrix frame;

    Complex trace_power(long t) const {
        Complex s(0.0, 0.0);
        for (Eigen::Index j = 0; j < phases.size(); ++j)
            s += std::polar(1.0, phases[j] * static_cast<double>(t));
        return s;
    }
};

inline double wrap_phase(double phi) {
    // map to (-pi, pi]
    double w = std::remainder(phi, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

// Unitary Schur decomposition: for a unitary input the Schur form is diagonal,
// so Q is the eigenvector frame and diag(T) carries the eigenphases.
inline EigenphaseSpectrum eigenphases(const UnitaryMatrix& u) {
    const ComplexMatrix& m = u.matrix();
    Eigen::ComplexSchur<ComplexMatrix> schur(m, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw NumericalError("eigenphases: Schur decomposition failed (dim " +
                             std::to_string(m.rows()) + ", defect " +
                             std::to_string(u.defect()) + ")");
    EigenphaseSpectrum out;
    out.frame = schur.matrixU();
    out.phases.resize(m.rows());
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        out.phases[j] = wrap_phase(std::arg(schur.matrixT()(j, j)));

    const double tol = 1e-8 * static_cast<double>(m.rows());
    ComplexMatrix recon = out.frame *
                          (out.phases.array().cast<Complex>() * Complex(0, 1)).exp().matrix().asDiagonal() *
                          out.frame.adjoint();
    if ((recon - m).norm() > tol)
        throw NumericalError("eigenphases: reconstruction residual " +
                             std::to_string((recon - m).norm()) + " exceeds " + std::to_string(tol));
    return out;
}

struct SvdResult {
    ComplexMatrix left;    // unitary
    RealVector singular_values;  // descending, nonnegative
    ComplexMatrix right;   // unitary; M = left * diag(sv) * right†
};

inline SvdResult svd(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (solver.info() != Eigen::Success)
        throw NumericalError("svd: decomposition failed");
    return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

namespace detail {

// Pade [6/6] approximant to exp(A) with scaling and squaring.
inline ComplexMatrix expm(const ComplexMatrix& a) {
    static const double c[] = {1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0,
                               1.0 / 15840.0, 1.0 / 665280.0};
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
        if (squarings > 60) throw NumericalError("expm: input norm too large");
    }
    ComplexMatrix as = a / std::pow(2.0, squarings);
    const Eigen::Index n = a.rows();
    ComplexMatrix a2 = as * as;
    ComplexMatrix a4 = a2 * a2;
    ComplexMatrix even = c[0] * ComplexMatrix::Identity(n, n) + c[2] * a2 + c[4] * a4 + c[6] * a4 * a2;
    ComplexMatrix odd = as * (c[1] * ComplexMatrix::Identity(n, n) + c[3] * a2 + c[5] * a4);
    // exp(as) ~ (even - odd)^{-1} (even + odd)
    ComplexMatrix r = (even - odd).partialPivLu().solve(even + odd);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace detail

// Reference e^{-i scale H} for Hermitian H. Test oracle only; the model
// layer builds its coupling unitary through the SVD closed form instead.
inline ComplexMatrix expm_oracle(const ComplexMatrix& h, double scale) {
    if (h.rows() != h.cols())
        throw DimensionError("expm_oracle: matrix must be square");
    if ((h - h.adjoint()).norm() > 1e-12 * std::max(1.0, h.norm()))
        throw std::invalid_argument("expm_oracle: input is not Hermitian");
    return detail::expm(Complex(0.0, -scale) * h);
}

}  // namespace qsff

#endif  // QSFF_LINALG_HPP
