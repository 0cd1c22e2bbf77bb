#ifndef WEFT_IO_HPP
#define WEFT_IO_HPP

// JSON schemas for models, points and polynomial elements, plus report
// serialization. Complex numbers serialize as [re, im] pairs and matrices as
// row-major nested arrays, so every payload round-trips language-neutrally.

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crossed.hpp"
#include "points.hpp"

namespace weft {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// ---- low-level encode/decode --------------------------------------------------

inline json to_json(cx v) { return json::array({v.real(), v.imag()}); }

inline cx cx_from_json(const json& j) {
    if (j.is_number()) return cx(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2) throw InputError("complex scalar must be [re, im]");
    return cx(j[0].get<double>(), j[1].get<double>());
}

inline json to_json(const Matrix& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(to_json(A(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty nested array");
    Eigen::Index rows = Eigen::Index(j.size());
    Eigen::Index cols = Eigen::Index(j[0].size());
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (Eigen::Index(j[size_t(i)].size()) != cols)
            throw InputError("matrix rows have unequal length");
        for (Eigen::Index c = 0; c < cols; ++c) A(i, c) = cx_from_json(j[size_t(i)][size_t(c)]);
    }
    return A;
}

inline json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

inline Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw InputError("vector must be an array");
    Vector v(Eigen::Index(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cx_from_json(j[size_t(i)]);
    return v;
}

// ---- model spec ---------------------------------------------------------------

struct ModelSpec {
    AdmissibleSequence X;
    int N = 5;
    double tol = 1e-9;
};

inline ModelSpec model_from_json(const json& j) {
    ModelSpec spec;
    std::string kind = j.at("model").get<std::string>();
    if (kind == "free") {
        spec.X.model = CorrespondenceModel::free(j.at("d").get<int>());
    } else if (kind == "auto") {
        spec.X.model = CorrespondenceModel::automorphism(j.at("alpha").get<std::vector<int>>());
        if (j.contains("n") && j.at("n").get<int>() != spec.X.model.n)
            throw InputError("n does not match the length of alpha");
    } else {
        throw InputError("model must be \"free\" or \"auto\"");
    }
    if (j.contains("N")) spec.N = j.at("N").get<int>();
    if (j.contains("tol")) spec.tol = j.at("tol").get<double>();
    const json& X = j.at("X");
    int ksup = 0;
    for (auto it = X.begin(); it != X.end(); ++it) ksup = std::max(ksup, std::stoi(it.key()));
    for (int k = 1; k <= ksup; ++k) {
        std::string key = std::to_string(k);
        std::int64_t dim = tensor_dim(spec.X.model, k);
        if (X.contains(key)) {
            json entry = X.at(key);
            Matrix Xk;
            if (entry.is_number() || (entry.is_array() && !entry.empty() && !entry[0].is_array()))
                Xk = cx_from_json(entry) * identity(dim); // scalar shorthand
            else
                Xk = matrix_from_json(entry);
            if (Xk.rows() != dim || Xk.cols() != dim)
                throw InputError("X_" + key + " has wrong dimension for degree " + key);
            spec.X.X.push_back(std::move(Xk));
        } else {
            spec.X.X.push_back(Matrix::Zero(dim, dim));
        }
    }
    if (j.contains("geometric_bound")) {
        GeometricBound b;
        b.c = j.at("geometric_bound").at("c").get<double>();
        b.rho = j.at("geometric_bound").at("rho").get<double>();
        spec.X.bound = b;
    }
    spec.X.validate();
    return spec;
}

// ---- point spec ---------------------------------------------------------------

inline ReprPoint point_from_json(const json& j, const CorrespondenceModel& model) {
    if (model.kind == ModelKind::Free) {
        std::vector<Matrix> zs;
        const json& z = j.at("z");
        if (int(z.size()) != model.d) throw InputError("point: expected d matrices in z");
        for (const auto& zi : z) zs.push_back(matrix_from_json(zi));
        return ReprPoint::free_point(model, std::move(zs));
    }
    Matrix T = matrix_from_json(j.at("T"));
    std::vector<Matrix> projs;
    for (const auto& P : j.at("sigma")) projs.push_back(matrix_from_json(P));
    return ReprPoint::auto_point(model, std::move(T), std::move(projs));
}

inline json to_json(const ReprPoint& p) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["m"] = p.m;
    if (p.model.kind == ModelKind::Free) {
        json z = json::array();
        for (const auto& b : p.blocks) z.push_back(to_json(b));
        j["z"] = std::move(z);
    } else {
        j["T"] = to_json(p.T);
        json s = json::array();
        for (const auto& P : p.sigma_projs) s.push_back(to_json(P));
        j["sigma"] = std::move(s);
    }
    return j;
}

// ---- polynomial spec ------------------------------------------------------------

inline PolynomialElement poly_from_json(const json& j, const CorrespondenceModel& model) {
    PolynomialElement F;
    int adim = model.kind == ModelKind::Free ? 1 : model.n;
    if (j.contains("a0")) {
        const json& a0 = j.at("a0");
        if (a0.is_number() || (a0.is_array() && a0.size() == 2 && a0[0].is_number()))
            F.a0 = Vector::Constant(adim, cx_from_json(a0));
        else
            F.a0 = vector_from_json(a0);
        if (F.a0.size() != adim) throw InputError("a0 has wrong dimension");
    } else {
        F.a0 = Vector::Zero(adim);
    }
    if (j.contains("terms"))
        for (auto it = j.at("terms").begin(); it != j.at("terms").end(); ++it) {
            GradedVector xi;
            xi.degree = std::stoi(it.key());
            xi.entries = vector_from_json(it.value());
            if (xi.entries.size() != tensor_dim(model, xi.degree))
                throw InputError("term of degree " + it.key() + " has wrong dimension");
            F.add_term(xi);
        }
    return F;
}

// ---- reports --------------------------------------------------------------------

inline json to_json(const VerificationReport& r, bool with_timings = false) {
    json j;
    j["name"] = r.name;
    j["residual"] = r.residual;
    j["tolerance"] = r.tolerance;
    j["tail_bound"] = r.tail_bound;
    j["excluded_blocks"] = r.excluded_blocks;
    j["pass"] = r.pass;
    j["runtime_ms"] = with_timings ? r.runtime_ms : 0.0;
    j["seed"] = r.seed;
    return j;
}

inline json reports_to_json(const std::vector<VerificationReport>& rs, bool with_timings = false) {
    json j = json::array();
    for (const auto& r : rs) j.push_back(to_json(r, with_timings));
    return j;
}

inline std::string reports_to_csv(const std::vector<VerificationReport>& rs) {
    std::ostringstream os;
    os << "parameter,value,residual,pass\n";
    for (const auto& r : rs) {
        os << r.name << "," << r.tolerance + r.tail_bound << "," << r.residual << ","
           << (r.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

// ---- file helpers -----------------------------------------------------------------

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // recover line/column from the byte offset
        size_t line = 1, col = 1;
        for (size_t i = 0; i < text.size() && i + 1 < size_t(e.byte); ++i) {
            if (text[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw InputError("malformed JSON in " + path + " at line " + std::to_string(line) +
                         ", column " + std::to_string(col));
    }
}

} // namespace weft

#endif
