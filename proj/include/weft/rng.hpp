#ifndef WEFT_RNG_HPP
#define WEFT_RNG_HPP

// Seeded RNG with platform-stable output. std::*_distribution is
// implementation-defined, so uniforms come straight from the mt19937_64
// bit stream and gaussians from Box-Muller.

#include <cmath>
#include <cstdint>
#include <random>

#include "numerics.hpp"

namespace weft {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double gaussian() {
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    cx cgaussian() { return cx(gaussian(), gaussian()) / std::sqrt(2.0); }

    std::uint64_t raw() { return gen_(); }

    // Derived seed for an independent per-check stream.
    std::uint64_t derive(std::uint64_t salt) {
        std::uint64_t x = base_ ^ (salt * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27; x *= 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    void set_base(std::uint64_t b) { base_ = b; }

    Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
        Matrix A(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = cgaussian();
        return A;
    }

    Vector vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
        return v;
    }

    // Random PSD matrix, optionally with a minimum-eigenvalue floor.
    Matrix psd(Eigen::Index n, double eig_floor = 0.0) {
        Matrix G = matrix(n, n);
        Matrix A = G * G.adjoint() / double(n);
        if (eig_floor > 0.0) A += eig_floor * identity(n);
        return A;
    }

    Matrix unitary(Eigen::Index n) {
        Matrix G = matrix(n, n);
        Eigen::HouseholderQR<Matrix> qr(G);
        Matrix Q = qr.householderQ();
        Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < n; ++i) {
            cx r = R(i, i);
            Q.col(i) *= (std::abs(r) > 0 ? r / std::abs(r) : cx(1, 0));
        }
        return Q;
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t base_ = 0;
};

} // namespace weft

#endif
