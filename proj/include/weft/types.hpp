#ifndef WEFT_TYPES_HPP
#define WEFT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace weft {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default tolerances, exposed on every public operation.
struct Tol {
    double tol = 1e-9;       // relative residual tolerance
    double rank_tol = 1e-12; // relative rank / invertibility cutoff
};

// All failures carry a stable machine-readable kind string so the CLI can
// surface them as structured error objects.
class Error : public std::runtime_error {
  public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

#define WEFT_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                          \
      public:                                                            \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}     \
    }

WEFT_DEFINE_ERROR(NotHermitian);
WEFT_DEFINE_ERROR(NotPositive);
WEFT_DEFINE_ERROR(ShapeMismatch);
WEFT_DEFINE_ERROR(DimensionCap);
WEFT_DEFINE_ERROR(NotAdmissible);
WEFT_DEFINE_ERROR(SingularR);
WEFT_DEFINE_ERROR(NotEquivalent);
WEFT_DEFINE_ERROR(CommutativityFails);
WEFT_DEFINE_ERROR(HypothesisCFails);
WEFT_DEFINE_ERROR(OutsideDisc);
WEFT_DEFINE_ERROR(CannotBoundTail);
WEFT_DEFINE_ERROR(NoConvergence);
WEFT_DEFINE_ERROR(NotAnIntertwiner);
WEFT_DEFINE_ERROR(NotAProjection);
WEFT_DEFINE_ERROR(NotInCommutant);
WEFT_DEFINE_ERROR(NotAPotential);
WEFT_DEFINE_ERROR(InputError);

#undef WEFT_DEFINE_ERROR

} // namespace weft

#endif
