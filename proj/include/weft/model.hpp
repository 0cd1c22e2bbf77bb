#ifndef WEFT_MODEL_HPP
#define WEFT_MODEL_HPP

// Concrete finite-dimensional models of the correspondence E over M, with
// graded index bookkeeping, insertion operators and left-module actions.
//
// Two models are supported:
//   Free  -- M = C, E = C^d. E^{tensor k} = C^(d^k) with big-endian word
//            indexing, so the left tensor factor is most significant.
//   Auto  -- M = C^n (diagonal algebra), alpha a coordinate permutation,
//            E = M with left action twisted by alpha. E^{tensor k} is
//            identified with M carrying the left action a -> alpha^k(a);
//            elements are stored as n-vectors, module operators as n x n
//            diagonal matrices.

#include <cstdint>
#include <vector>

#include "numerics.hpp"

namespace weft {

enum class ModelKind { Free, Auto };

struct CorrespondenceModel {
    ModelKind kind = ModelKind::Free;
    int d = 1;                  // Free: fiber dimension
    int n = 1;                  // Auto: size of the diagonal algebra
    std::vector<int> alpha;     // Auto: permutation of {0..n-1}
    std::int64_t dim_cap = 1'000'000;

    static CorrespondenceModel free(int d, std::int64_t cap = 1'000'000) {
        if (d < 1) throw InputError("free model requires d >= 1");
        CorrespondenceModel m;
        m.kind = ModelKind::Free;
        m.d = d;
        m.dim_cap = cap;
        return m;
    }

    static CorrespondenceModel automorphism(std::vector<int> perm,
                                            std::int64_t cap = 1'000'000) {
        CorrespondenceModel m;
        m.kind = ModelKind::Auto;
        m.n = int(perm.size());
        if (m.n < 1) throw InputError("auto model requires n >= 1");
        std::vector<bool> seen(perm.size(), false);
        for (int p : perm) {
            if (p < 0 || p >= m.n || seen[p]) throw InputError("alpha is not a permutation");
            seen[p] = true;
        }
        m.alpha = std::move(perm);
        m.dim_cap = cap;
        return m;
    }

    // alpha(a)(i) = a(alpha(i)); alpha_pow applies it k times.
    Vector alpha_pow(const Vector& a, int k) const {
        if (kind == ModelKind::Free) return a;
        if (a.size() != n) throw ShapeMismatch("alpha_pow: expected n-vector");
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int t = 0; t < k; ++t)
            for (int i = 0; i < n; ++i) p[i] = alpha[p[i]];
        Vector out(n);
        for (int i = 0; i < n; ++i) out(i) = a(p[i]);
        return out;
    }
};

// Linear dimension of E^{tensor k}.
inline std::int64_t tensor_dim(const CorrespondenceModel& model, int k) {
    if (k < 0) throw InputError("tensor_dim: negative degree");
    if (model.kind == ModelKind::Auto) return model.n;
    std::int64_t dim = 1;
    for (int i = 0; i < k; ++i) {
        dim *= model.d;
        if (dim > model.dim_cap)
            throw DimensionCap("tensor_dim: d^k exceeds the configured cap");
    }
    return dim;
}

// Big-endian word index in the free model: index = sum letters[j]*d^(k-1-j).
struct Word {
    std::vector<int> letters;

    int degree() const { return int(letters.size()); }

    std::int64_t index(int d) const {
        std::int64_t idx = 0;
        for (int l : letters) idx = idx * d + l;
        return idx;
    }

    static Word from_index(std::int64_t idx, int d, int degree) {
        Word w;
        w.letters.assign(degree, 0);
        for (int j = degree - 1; j >= 0; --j) {
            w.letters[j] = int(idx % d);
            idx /= d;
        }
        return w;
    }
};

// An element of E^{tensor k} (Free: C^(d^k); Auto: C^n).
struct GradedVector {
    int degree = 0;
    Vector entries;
};

// Matrix of the left action phi_k(a) on E^{tensor k}.
//   Free: a is a scalar (1-vector), result a*I_{d^k}.
//   Auto: multiplication by alpha^k(a).
inline Matrix left_action(const CorrespondenceModel& model, const Vector& a, int k) {
    if (model.kind == ModelKind::Free) {
        if (a.size() != 1) throw ShapeMismatch("left_action: scalar expected in the free model");
        return a(0) * identity(tensor_dim(model, k));
    }
    return Matrix(model.alpha_pow(a, k).asDiagonal());
}

// Insertion operator L_xi : H -> E^{tensor k} (x) H for xi of degree k and
// H of dimension m. In the auto model H carries the representation sigma
// and the balanced tensor is identified with H itself, so the caller must
// supply sigma(xi); this overload covers the free model and the standard
// auto representation sigma = diag (x) I_m.
inline Matrix insertion(const CorrespondenceModel& model, const GradedVector& xi, int m) {
    if (model.kind == ModelKind::Free) {
        if (xi.entries.size() != tensor_dim(model, xi.degree))
            throw ShapeMismatch("insertion: wrong fiber dimension");
        Matrix col = xi.entries;
        return kron(col, identity(m));
    }
    return kron(Matrix(xi.entries.asDiagonal()), identity(m));
}

// Concatenation of elementary graded vectors.
//   Free: entries[(u,v)] = xi[u]*eta[v] (big-endian word order, i.e. kron).
//   Auto: xi (x) eta = alpha^{deg eta}(xi) .* eta, the unique product for
//         which phi_{k+l}(a) acts as multiplication by alpha^{k+l}(a).
inline GradedVector tensor_concat(const CorrespondenceModel& model, const GradedVector& xi,
                                  const GradedVector& eta) {
    GradedVector out;
    out.degree = xi.degree + eta.degree;
    if (model.kind == ModelKind::Free) {
        out.entries = kron(Matrix(xi.entries), Matrix(eta.entries)).col(0);
    } else {
        out.entries = model.alpha_pow(xi.entries, eta.degree).cwiseProduct(eta.entries);
    }
    return out;
}

// Graded tensor of module operators: A on E^{tensor p}, B on E^{tensor q}.
//   Free: kron(A, B).
//   Auto: both are diagonal module operators; A (x) B acts on the
//         concatenation as multiplication by alpha^q(diag A) .* diag B.
inline Matrix op_tensor(const CorrespondenceModel& model, const Matrix& A, int p,
                        const Matrix& B, int q) {
    (void)p;
    if (model.kind == ModelKind::Free) return kron(A, B);
    Vector a = A.diagonal(), b = B.diagonal();
    if (op_norm(Matrix(A - Matrix(a.asDiagonal()))) > 1e-12 * std::max(1.0, op_norm(A)) ||
        op_norm(Matrix(B - Matrix(b.asDiagonal()))) > 1e-12 * std::max(1.0, op_norm(B)))
        throw ShapeMismatch("op_tensor: auto-model module operators must be diagonal");
    return Matrix(model.alpha_pow(a, q).cwiseProduct(b).asDiagonal());
}

inline GradedVector basis_vector(const CorrespondenceModel& model, const Word& w) {
    if (model.kind != ModelKind::Free) throw InputError("basis_vector: free model only");
    GradedVector v;
    v.degree = w.degree();
    v.entries = Vector::Zero(tensor_dim(model, v.degree));
    v.entries(w.index(model.d)) = 1.0;
    return v;
}

} // namespace weft

#endif
