#ifndef WEFT_TEST_HELPERS_HPP
#define WEFT_TEST_HELPERS_HPP

#include "weft/weft.hpp"

namespace weft::testing {

// d = 1 scalar sequence from a list of x_k values.
inline AdmissibleSequence scalar_X(std::initializer_list<double> xs) {
    AdmissibleSequence X;
    X.model = CorrespondenceModel::free(1);
    for (double x : xs) X.X.push_back(Matrix::Constant(1, 1, cx(x, 0)));
    return X;
}

inline AdmissibleSequence fibonacci_X() { return scalar_X({1.0, 1.0}); }

inline ReprPoint scalar_point(double re, double im = 0.0) {
    return ReprPoint::free_point(CorrespondenceModel::free(1), {Matrix::Constant(1, 1, cx(re, im))});
}

inline GradedVector unit_vector(const CorrespondenceModel& model, int degree, int index = 0) {
    GradedVector v;
    v.degree = degree;
    v.entries = Vector::Zero(tensor_dim(model, degree));
    v.entries(index) = 1.0;
    return v;
}

inline double sv(const Matrix& A) { return A(0, 0).real(); } // scalar view

} // namespace weft::testing

#endif
