// weft command-line driver: weighted Fock space computations and the
// verification harness, with JSON in/out.
//
// Exit codes: 0 success / all checks pass, 1 verification failure, 2 input
// or precondition error.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "weft/weft.hpp"

namespace {

using weft::json;

struct CommonArgs {
    std::string model_file;
    std::string point_file;
    std::string poly_file;
    int trunc = -1;
    double tol = -1.0;
    std::uint64_t seed = 7;
    std::string output = "json";
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_model = true) {
    auto* opt = cmd->add_option("--model", a.model_file, "model spec JSON file");
    if (need_model) opt->required();
    cmd->add_option("--point", a.point_file, "point spec JSON file");
    cmd->add_option("--poly", a.poly_file, "polynomial element JSON file");
    cmd->add_option("--trunc", a.trunc, "truncation degree N");
    cmd->add_option("--tol", a.tol, "tolerance override");
    cmd->add_option("--seed", a.seed, "seed for randomized checks");
    cmd->add_option("--output", a.output, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--timings", a.timings, "include wall-clock runtimes in reports");
}

weft::ModelSpec load_model(const CommonArgs& a) {
    weft::ModelSpec spec = weft::model_from_json(weft::load_json(a.model_file));
    if (a.trunc > 0) spec.N = a.trunc;
    if (a.tol > 0) spec.tol = a.tol;
    return spec;
}

weft::ReprPoint load_point(const CommonArgs& a, const weft::CorrespondenceModel& model) {
    if (a.point_file.empty()) throw weft::InputError("--point FILE is required");
    return weft::point_from_json(weft::load_json(a.point_file), model);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int emit_reports(std::vector<weft::VerificationReport> reports, const CommonArgs& a) {
    if (a.output == "csv") {
        std::cout << weft::reports_to_csv(reports);
    } else {
        json j;
        j["schema_version"] = weft::kSchemaVersion;
        j["reports"] = weft::reports_to_json(reports, a.timings);
        j["all_pass"] = weft::all_pass(reports);
        emit(j);
    }
    return weft::all_pass(reports) ? 0 : 1;
}

int cmd_weights(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Zc = weft::canonical_Z(R);
    weft::WeightSequence Zp = weft::positive_Z(R);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    json r2 = json::array(), zc = json::array(), zp = json::array();
    for (int k = 0; k <= spec.N; ++k) r2.push_back(weft::to_json(R.sq(k)));
    for (int k = 0; k <= spec.N; ++k) zc.push_back(weft::to_json(Zc.at(k)));
    for (int k = 0; k <= spec.N; ++k) zp.push_back(weft::to_json(Zp.at(k)));
    j["R2"] = std::move(r2);
    j["Z_canonical"] = std::move(zc);
    j["Z_positive"] = std::move(zp);
    weft::HypothesisRecord hyp = weft::hypothesis_check(spec.X, Zc, spec.N);
    j["hypotheses"] = {{"A", hyp.A},
                       {"B", hyp.B},
                       {"epsilon", hyp.epsilon},
                       {"C", hyp.C},
                       {"a", hyp.a},
                       {"rho_reported", hyp.rho_reported},
                       {"rho_tail", hyp.rho_tail}};
    auto rep = weft::check_associated(Zc, spec.X, spec.N, spec.tol);
    j["association"] = weft::to_json(rep, a.timings);
    emit(j);
    return rep.pass ? 0 : 1;
}

int cmd_fock(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Z = weft::canonical_Z(R);
    weft::TruncatedFock bare(spec.X.model, spec.N, 1);
    weft::GradedVector xi;
    xi.degree = 1;
    xi.entries = weft::Vector::Zero(weft::tensor_dim(spec.X.model, 1));
    xi.entries(0) = 1.0;
    if (!a.poly_file.empty()) {
        json pj = weft::load_json(a.poly_file);
        if (pj.contains("xi")) {
            xi.degree = pj.value("degree", 1);
            xi.entries = weft::vector_from_json(pj.at("xi"));
        }
    }
    weft::GradedOperator W = weft::weighted_shift(xi, Z, bare);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    j["levels"] = spec.N;
    json blocks = json::array();
    for (const auto& [jk, B] : W.blocks)
        blocks.push_back({{"row_degree", jk.first}, {"col_degree", jk.second},
                          {"matrix", weft::to_json(B)}});
    j["W_blocks"] = std::move(blocks);
    auto rep = weft::rescale_check(Z, bare, spec.tol);
    j["rescaling"] = weft::to_json(rep, a.timings);
    emit(j);
    return rep.pass ? 0 : 1;
}

int cmd_disc(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::ReprPoint z = load_point(a, spec.X.model);
    weft::DiscResult r = weft::disc_membership(z, spec.X, spec.tol);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    j["membership"] = weft::to_string(r.membership);
    j["norm"] = r.norm;
    j["tail_bound"] = r.tail_bound;
    emit(j);
    return 0;
}

int cmd_poisson(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::ReprPoint z = load_point(a, spec.X.model);
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Z = weft::canonical_Z(R);
    weft::PoissonKernel K = weft::poisson_kernel(z, spec.X, Z, spec.N, spec.tol);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    json blocks = json::array();
    for (const auto& B : K.block) blocks.push_back(weft::to_json(B));
    j["kernel_blocks"] = std::move(blocks);
    j["Q"] = weft::to_json(K.Q);
    j["tail_bound"] = K.tail_bound;
    auto rep = weft::poisson_isometry_check(K, std::max(spec.tol, 1e-8));
    j["isometry"] = weft::to_json(rep, a.timings);
    emit(j);
    return rep.pass ? 0 : 1;
}

int cmd_berezin(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::ReprPoint z = load_point(a, spec.X.model);
    if (a.poly_file.empty()) throw weft::InputError("--poly FILE is required");
    weft::PolynomialElement F = weft::poly_from_json(weft::load_json(a.poly_file), spec.X.model);
    weft::DiscResult disc = weft::disc_membership(z, spec.X, spec.tol);
    if (disc.membership == weft::Membership::Outside)
        throw weft::OutsideDisc("berezin: point lies outside the closed disc");
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    j["membership"] = weft::to_string(disc.membership);
    j["value"] = weft::to_json(weft::berezin(F, z));
    if (disc.membership == weft::Membership::Interior) {
        weft::RSequence R = weft::compute_R(spec.X, spec.N);
        weft::WeightSequence Z = weft::canonical_Z(R);
        weft::TruncatedFock bare(spec.X.model, spec.N, 1);
        weft::Evaluation ev =
            weft::evaluate(z, weft::poly_operator(F, Z, bare), spec.X, Z, spec.N, spec.tol);
        j["evaluation_value"] = weft::to_json(ev.value);
        j["evaluation_tail_bound"] = ev.tail_bound;
    }
    emit(j);
    return 0;
}

int cmd_dilate(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::ReprPoint z = load_point(a, spec.X.model);
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Z = weft::canonical_Z(R);
    weft::Tol tol;
    tol.tol = spec.tol;
    weft::Coextension co = weft::coextend(z, spec.X, Z, spec.N, tol);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    j["U_dim"] = co.U_basis.cols();
    j["Q"] = weft::to_json(co.K.Q);
    if (co.U_basis.cols() > 0) j["v"] = weft::to_json(co.v);
    std::vector<weft::VerificationReport> reps{co.isometry, co.intertwining, co.coisometry};
    j["reports"] = weft::reports_to_json(reps, a.timings);
    emit(j);
    return weft::all_pass(reps) ? 0 : 1;
}

int cmd_wold(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    weft::ReprPoint v = load_point(a, spec.X.model);
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Z = weft::canonical_Z(R);
    weft::WoldSplit ws = weft::wold(v, spec.X, Z);
    json j;
    j["schema_version"] = weft::kSchemaVersion;
    j["multiplicity"] = ws.multiplicity;
    j["induced_dim"] = ws.K_ind.cols();
    j["full_dim"] = ws.K_full.cols();
    j["levels"] = ws.levels;
    std::vector<weft::VerificationReport> reps{ws.projection, ws.orthogonality, ws.induced_match,
                                               ws.full_coisometric};
    j["reports"] = weft::reports_to_json(reps, a.timings);
    emit(j);
    return weft::all_pass(reps) ? 0 : 1;
}

int cmd_dual(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    if (spec.X.model.kind != weft::ModelKind::Free)
        throw weft::InputError("dual: free model required");
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Z = weft::canonical_Z(R);
    weft::Rng rng(a.seed);
    int m = 2;
    weft::DualPoint th;
    th.degree = 1;
    th.theta = rng.matrix(std::int64_t(spec.X.model.d) * m, m);
    weft::GradedVector xi;
    xi.degree = 1;
    xi.entries = rng.vector(spec.X.model.d);
    weft::Matrix b = rng.matrix(m, m);
    std::vector<weft::VerificationReport> reps;
    reps.push_back(weft::commutant_check(th, xi, b, Z, spec.N, m, std::max(spec.tol, 1e-8)));
    reps.push_back(weft::dual_associated_check(spec.X, Z, std::min(spec.N, 4), 1e-9));
    weft::TruncatedFock FH(spec.X.model, spec.N, m);
    weft::SymbolResult sym = weft::recover_symbol(weft::dual_shift(th, Z, FH), 1, Z, 1e-9);
    reps.push_back(weft::VerificationReport::make(
        "symbol_roundtrip",
        weft::op_norm(weft::Matrix(sym.theta.theta - th.theta)) /
            std::max(1.0, weft::op_norm(th.theta)),
        1e-9));
    for (auto& r : reps) r.seed = a.seed;
    return emit_reports(reps, a);
}

int cmd_crossed(const CommonArgs& a) {
    weft::ModelSpec spec = load_model(a);
    if (spec.X.model.kind != weft::ModelKind::Auto)
        throw weft::InputError("crossed: auto model required");
    weft::RSequence R = weft::compute_R(spec.X, spec.N);
    weft::WeightSequence Zc = weft::canonical_Z(R);
    weft::crossed::AutoSpec cs;
    cs.model = spec.X.model;
    cs.N = spec.N;
    for (int k = 1; k <= spec.N; ++k) cs.z.push_back(Zc.at(k).diagonal());
    weft::crossed::Generators g = weft::crossed::build_generators(cs);
    std::vector<weft::VerificationReport> reps;
    {
        double worst = 0.0;
        std::int64_t inner = std::int64_t(cs.model.n) * cs.N;
        for (int k = -(cs.N - 1); k <= cs.N - 1; ++k)
            worst = std::max(worst, weft::op_norm(weft::Matrix(
                                        (weft::crossed::beta(g, g.D.at(k)) - g.D.at(k - 1))
                                            .topLeftCorner(inner, inner))));
        weft::Rng rng(a.seed);
        weft::Vector av = rng.vector(cs.model.n);
        worst = std::max(worst, weft::op_norm(weft::Matrix(
                                    (weft::crossed::beta(g, g.phi(av)) -
                                     g.phi(cs.model.alpha_pow(av, 1)))
                                        .topLeftCorner(inner, inner))));
        reps.push_back(weft::VerificationReport::make("crossed_beta", worst, 1e-12, 0, 1));
        std::vector<weft::cx> samples;
        for (int q = 0; q < 8; ++q)
            samples.push_back(std::exp(weft::cx(0, 2.0 * M_PI * q / 8.0)));
        reps.push_back(weft::crossed::gauge_check(g, samples, 1e-12));
        reps.push_back(weft::crossed::ideal_defect(g, g.W.adjoint(), 1e-10).report);
    }
    for (auto& r : reps) r.seed = a.seed;
    return emit_reports(reps, a);
}

int cmd_verify(const CommonArgs& a) {
    auto reports = weft::run_verification_suite(a.seed);
    for (auto& r : reports) r.seed = a.seed;
    if (a.output == "json") {
        for (const auto& r : reports)
            std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " residual=" << r.residual
                      << " bound=" << r.tolerance + r.tail_bound << "\n";
    }
    return emit_reports(reports, a);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted Fock space toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::map<std::string, std::function<int(const CommonArgs&)>> handlers = {
        {"weights", cmd_weights}, {"fock", cmd_fock},       {"disc", cmd_disc},
        {"poisson", cmd_poisson}, {"berezin", cmd_berezin}, {"dilate", cmd_dilate},
        {"wold", cmd_wold},       {"dual", cmd_dual},       {"crossed", cmd_crossed},
    };
    for (auto& [name, fn] : handlers) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, args);
    }
    auto* ver = app.add_subcommand("verify", "run the full identity suite");
    add_common(ver, args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (auto& [name, fn] : handlers)
            if (app.get_subcommand(name)->parsed()) return fn(args);
        if (ver->parsed()) return cmd_verify(args);
    } catch (const weft::Error& e) {
        weft::json j;
        j["error"] = {{"kind", e.kind()}, {"message", e.what()}};
        std::cout << j.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        weft::json j;
        j["error"] = {{"kind", "Unexpected"}, {"message", e.what()}};
        std::cout << j.dump(2) << "\n";
        return 2;
    }
    return 2;
}
