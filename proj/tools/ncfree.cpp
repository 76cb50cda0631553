// ncfree command line tool. Every report is JSON (or a flat text rendering)
// with the effective configuration embedded; exit 0 ok, 1 verification
// failure, 2 usage error.

#include <CLI11.hpp>

#include <ncfree/ncfree.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace ncfree;

namespace {

struct Config {
    std::uint64_t seed = 1;
    int workers = 1;
    double tol = 1e-9;
    double fd_step = 1e-3;
    bool richardson = true;
    int expand_maxdeg = 8;
    // sampler
    int samples = 200;
    double radius = 0.5;
    std::vector<int> sizes{1, 2, 3, 4};
    // realization
    double null_cutoff = 1e-10;
    double psd_tol = 1e-9;
    double eval_radius = 0.1;
    double reconstruct_tol = 1e-8;
    double eval_tol = 1e-6;
    double hessian_tol = 1e-5;
    double psd_floor = -1e-8;
    // continuation
    int grid = 16;
    int bisection_steps = 40;
    int overlap_samples = 10;
    double overlap_radius = 0.05;
    double overlap_tol = 1e-7;
    // labs
    int bch_samples = 20;
    double bch_radius = 0.3466;
    double bch_tol = 1e-4;
    int divergence_N = 200;
    double triangular_tol = 1e-9;

    json to_json() const {
        return json{{"seed", seed},
                    {"workers", workers},
                    {"tol", tol},
                    {"fd_step", fd_step},
                    {"richardson", richardson},
                    {"expand_maxdeg", expand_maxdeg},
                    {"samples", samples},
                    {"radius", radius},
                    {"sizes", sizes},
                    {"null_cutoff", null_cutoff},
                    {"psd_tol", psd_tol},
                    {"eval_radius", eval_radius},
                    {"reconstruct_tol", reconstruct_tol},
                    {"eval_tol", eval_tol},
                    {"hessian_tol", hessian_tol},
                    {"psd_floor", psd_floor},
                    {"grid", grid},
                    {"bisection_steps", bisection_steps},
                    {"overlap_samples", overlap_samples},
                    {"overlap_radius", overlap_radius},
                    {"overlap_tol", overlap_tol},
                    {"bch_samples", bch_samples},
                    {"bch_radius", bch_radius},
                    {"bch_tol", bch_tol},
                    {"divergence_N", divergence_N},
                    {"triangular_tol", triangular_tol}};
    }

    void load(const json& j) {
        require(j.is_object(), ErrorKind::invalid_input, "config must be a JSON object");
        const json known = to_json();
        for (const auto& [key, value] : j.items())
            require(known.contains(key), ErrorKind::invalid_input, "unknown config key '" + key + "'");
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        get("seed", seed);
        get("workers", workers);
        get("tol", tol);
        get("fd_step", fd_step);
        get("richardson", richardson);
        get("expand_maxdeg", expand_maxdeg);
        get("samples", samples);
        get("radius", radius);
        get("sizes", sizes);
        get("null_cutoff", null_cutoff);
        get("psd_tol", psd_tol);
        get("eval_radius", eval_radius);
        get("reconstruct_tol", reconstruct_tol);
        get("eval_tol", eval_tol);
        get("hessian_tol", hessian_tol);
        get("psd_floor", psd_floor);
        get("grid", grid);
        get("bisection_steps", bisection_steps);
        get("overlap_samples", overlap_samples);
        get("overlap_radius", overlap_radius);
        get("overlap_tol", overlap_tol);
        get("bch_samples", bch_samples);
        get("bch_radius", bch_radius);
        get("bch_tol", bch_tol);
        get("divergence_N", divergence_N);
        get("triangular_tol", triangular_tol);
    }

    FdOptions fd() const { return {fd_step, richardson}; }

    SamplerConfig sampler() const {
        SamplerConfig c;
        c.samples = samples;
        c.radius = radius;
        c.sizes = sizes;
        c.seed = seed;
        c.workers = workers;
        c.tol = tol;
        return c;
    }
};

struct Output {
    std::string format = "json";
    std::optional<std::string> out;  // report file instead of stdout
};

void render_text(std::ostream& os, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render_text(os, v, prefix.empty() ? k : prefix + "." + k);
        return;
    }
    os << prefix << ": " << j.dump() << '\n';
}

void emit(const Output& o, const json& report) {
    std::ostringstream os;
    if (o.format == "text") render_text(os, report, "");
    else os << report.dump(2) << '\n';
    if (o.out) {
        std::ofstream f(*o.out, std::ios::binary);
        if (!f) fail(ErrorKind::invalid_input, "cannot write " + *o.out);
        f << os.str();
    } else {
        std::cout << os.str();
    }
}

void write_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorKind::invalid_input, "cannot write " + path);
    f << j.dump(2) << '\n';
}

json report_head(const std::string& command, const Config& cfg) {
    return json{{"command", command}, {"config", cfg.to_json()}};
}

json witness_json(const MiddleWitness& w) {
    json entries = json::array();
    for (const auto& e : w.entries) {
        json c = json::array();
        for (Eigen::Index b = 0; b < e.coeffs.size(); ++b) c.push_back(to_json(e.coeffs(b)));
        entries.push_back(json{{"word", format_word(e.word)}, {"coeffs", c}});
    }
    return json{{"kind", std::string(to_string(w.kind))}, {"N", w.N}, {"min_eig", w.min_eig}, {"entries", entries}};
}

MatrixTuple read_point(const std::string& path) { return tuple_from_json(read_json_file(path)); }

NCSeries read_series(const std::string& path) { return series_from_json(read_json_file(path)); }

// ---- commands -------------------------------------------------------------------

int cmd_eval(const Config& cfg, const Output& o, const std::string& expr_file, const std::string& point_file) {
    const ExprPtr e = read_expr_file(expr_file);
    const MatrixTuple x = read_point(point_file);
    json r = report_head("eval", cfg);
    r["expr"] = to_string(*e);
    r["value"] = to_json(eval_expr(*e, x));
    emit(o, r);
    return 0;
}

int cmd_diff(const Config& cfg, const Output& o, const std::string& expr_file, const std::string& op_name, bool fd,
             const std::string& point_file, const std::string& dir_file, int maxdeg) {
    const ExprPtr e = read_expr_file(expr_file);
    const DiffOp op = parse_diff_op(op_name);
    const MatrixTuple z = read_point(point_file);
    const MatrixTuple h = read_point(dir_file);
    json r = report_head("diff", cfg);
    r["expr"] = to_string(*e);
    r["op"] = std::string(to_string(op));
    r["route"] = fd ? "fd" : "symbolic";
    if (fd) {
        r["value"] = to_json(fd_derivative(*e, z, h, op, cfg.fd()));
    } else {
        const int deg = maxdeg > 0 ? maxdeg : cfg.expand_maxdeg;
        const NCSeries s = expand(*e, deg, z.d(), coefficient_size(*e));
        r["maxdeg"] = deg;
        r["value"] = to_json(eval_form(symbolic_derivative(s, op), z, h));
    }
    emit(o, r);
    return 0;
}

int cmd_certify(const Config& cfg, const Output& o, const std::string& series_file, int N, bool sample) {
    const NCSeries s = read_series(series_file);
    const CertificateReport cert = psh_certificate(s, N, cfg.tol);
    json r = report_head("certify-psh", cfg);
    r["N"] = N;
    r["verdict"] = cert.psd() ? "PSD" : "NotPSD";
    r["cplus"] = json{{"psd", cert.cplus.psd}, {"min_eig", cert.cplus.min_eigenvalue}, {"asymmetry", cert.asymmetry_plus}};
    r["cminus"] = json{{"psd", cert.cminus.psd}, {"min_eig", cert.cminus.min_eigenvalue}, {"asymmetry", cert.asymmetry_minus}};
    if (cert.witness) {
        r["witness"] = witness_json(*cert.witness);
        const WitnessConfirmation c = confirm_witness(s, *cert.witness, cfg.tol);
        r["confirmation"] = json{{"confirmed", c.confirmed}, {"eps", c.eps}, {"quadratic", c.quadratic}, {"min_eig", c.min_eig}};
    }
    if (sample) {
        const auto w = psh_sample_test(s, cfg.sampler());
        r["sampler"] = w ? json{{"found", true}, {"index", w->index}, {"n", w->z.n}, {"min_eig", w->min_eig}}
                         : json{{"found", false}, {"samples", cfg.samples}};
    }
    emit(o, r);
    return cert.psd() ? 0 : 1;
}

int cmd_realize(const Config& cfg, const Output& o, const std::string& series_file, int N, const std::string& out,
                std::optional<std::uint64_t> rotation) {
    const NCSeries s = read_series(series_file);
    BuildOptions opt;
    opt.null_cutoff = cfg.null_cutoff;
    opt.psd_tol = cfg.psd_tol;
    opt.rotation_seed = rotation;
    const Realization real = build_realization(s, N, opt);
    write_json(out, to_json(real));
    json r = report_head("realize", cfg);
    r["N"] = N;
    r["out"] = out;
    r["dim_plus"] = real.dim_plus();
    r["dim_minus"] = real.dim_minus();
    r["growth"] = real.growth;
    r["dropped_entries"] = real.gns->dropped_entries;
    r["min_eig_plus"] = real.gns->min_eig_plus;
    r["min_eig_minus"] = real.gns->min_eig_minus;
    emit(o, r);
    return 0;
}

int cmd_verify(const Config& cfg, const Output& o, const std::string& real_file, const std::string& series_file,
               int samples) {
    const Realization real = realization_from_json(read_json_file(real_file));
    const NCSeries s = read_series(series_file);
    require(s.d() == real.d && s.k() == real.k, ErrorKind::dimension_mismatch, "series and realization differ in shape");
    for (cd c : real.center)
        require(c == cd(0.0), ErrorKind::precondition_violated, "verification needs a realization centered at 0");

    double recon = 0.0;
    int words = 0;
    for (int L = 0; L <= real.N; ++L)
        for (const auto& b : words_of_length(real.d, L, true, true)) {
            const Matrix c = s.coeff(b);
            recon = std::max(recon, (reconstruct_coefficient(real, b) - c).norm() / (1.0 + c.norm()));
            ++words;
        }
    Rng rng(cfg.seed);
    double eval_dev = 0.0, hess_dev = 0.0, min_hess = 0.0, t_norm = 0.0;
    for (int i = 0; i < samples; ++i) {
        const int n = cfg.sizes[static_cast<std::size_t>(i) % cfg.sizes.size()];
        const MatrixTuple z = random_tuple(real.d, n, rng, cfg.eval_radius);
        const MatrixTuple h = random_tuple(real.d, n, rng, 1.0);
        t_norm = std::max(t_norm, realization_values(real, z).t_norm);
        const Matrix fz = eval_series(s, z);
        eval_dev = std::max(eval_dev, (eval_realization(real, z) - fz).norm() / (1.0 + fz.norm()));
        const Matrix hs = realization_hessian(real, z, h);
        const Matrix fd = fd_derivative([&](const MatrixTuple& x) { return eval_realization(real, x); }, z, h,
                                        DiffOp::Hessian, cfg.fd());
        hess_dev = std::max(hess_dev, (hs - fd).norm() / (1.0 + fd.norm()));
        min_hess = std::min(min_hess, min_hermitian_eig(hs));
    }
    const bool ok = recon <= cfg.reconstruct_tol && eval_dev <= cfg.eval_tol && hess_dev <= cfg.hessian_tol &&
                    min_hess >= cfg.psd_floor;
    json r = report_head("verify-realization", cfg);
    r["samples"] = samples;
    r["words_checked"] = words;
    r["reconstruction_deviation"] = recon;
    r["eval_deviation"] = eval_dev;
    r["hessian_deviation"] = hess_dev;
    r["hessian_min_eig"] = min_hess;
    r["max_t_norm"] = t_norm;
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_continue(const Config& cfg, const Output& o, const std::string& real_file, const std::string& path_file,
                 const std::optional<std::string>& out, int maxdeg) {
    Realization cur = realization_from_json(read_json_file(real_file));
    const std::vector<PathStep> path = path_from_json(read_json_file(path_file));
    json steps = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < path.size(); ++i) {
        ContinuationOptions opt;
        opt.grid = path[i].grid.value_or(cfg.grid);
        opt.tol = path[i].tol.value_or(cfg.tol);
        opt.bisection_steps = cfg.bisection_steps;
        opt.maxdeg = maxdeg;
        json step{{"index", i}};
        json w = json::array();
        for (cd c : path[i].w) w.push_back(to_json(c));
        step["w"] = w;
        const SegmentValidity v = segment_validity(cur, path[i].w, opt);
        step["valid"] = v.valid;
        step["t_max"] = v.t_max;
        step["min_margin"] = v.min_margin;
        if (!v.valid) {
            ok = false;
            steps.push_back(step);
            break;
        }
        const Realization next = continuation_step(cur, path[i].w, opt).next;
        const OverlapReport ov =
            overlap_check(cur, next, next.center, cfg.overlap_samples, cfg.overlap_radius, derive_seed(cfg.seed, i));
        json center = json::array();
        for (cd c : next.center) center.push_back(to_json(c));
        step["center"] = center;
        step["overlap_compared"] = ov.compared;
        step["overlap_skipped"] = ov.skipped;
        step["overlap_deviation"] = ov.max_deviation;
        if (ov.compared == 0 || ov.max_deviation > cfg.overlap_tol) ok = false;
        steps.push_back(step);
        cur = next;
    }
    if (out) write_json(*out, to_json(cur));
    json r = report_head("continue", cfg);
    r["steps"] = steps;
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_log_radius(const Config& cfg, const Output& o, int N, const std::optional<std::string>& csv) {
    const LogRadiusReport lr = log_radius_experiment(N);
    if (csv) {
        std::ofstream f(*csv, std::ios::binary);
        if (!f) fail(ErrorKind::invalid_input, "cannot write " + *csv);
        f << log_radius_csv(lr);
    }
    json head = json::array();
    for (int n = 0; n <= std::min(N, 4); ++n) {
        Matrix c = lr.coeffs[static_cast<std::size_t>(n)].cast<cd>();
        head.push_back(to_json(c));
    }
    const bool ok = std::abs(lr.root_test - 0.5) <= 0.02 && lr.trace_exactly_zero;
    json r = report_head("lab log-radius", cfg);
    r["N"] = N;
    r["first_coefficients"] = head;
    r["window"] = json::array({lr.window_lo, lr.window_hi});
    r["root_test"] = lr.root_test;
    r["slope_test"] = lr.slope_test;
    r["radius_estimate"] = lr.radius();
    r["trace_exactly_zero"] = lr.trace_exactly_zero;
    r["max_trace"] = lr.max_trace;
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_bch(const Config& cfg, const Output& o, int maxdeg) {
    const NCSeries b = bch_series(maxdeg);
    const auto inside = bch_numeric_check(b, cfg.bch_samples, cfg.bch_radius, cfg.seed);
    double worst = 0.0;
    for (const auto& s : inside) worst = std::max(worst, s.deviation);
    // where the truncation stops agreeing
    json sweep = json::array();
    std::optional<double> crossover;
    for (int j = 1; j <= 16; ++j) {
        const double rad = 0.25 * j;
        double dev = 0.0;
        try {
            for (const auto& s : bch_numeric_check(b, 5, rad, derive_seed(cfg.seed, static_cast<std::uint64_t>(j))))
                dev = std::max(dev, s.deviation);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::log_branch_violation) throw;
            dev = std::numeric_limits<double>::infinity();
        }
        sweep.push_back(json{{"norm_sum", rad}, {"deviation", std::isfinite(dev) ? json(dev) : json("branch")}});
        if (!crossover && !(dev <= cfg.bch_tol)) crossover = rad;
    }
    const bool deg2 = b.coeff(parse_word("z1 z2"))(0, 0) == cd(0.5) && b.coeff(parse_word("z2 z1"))(0, 0) == cd(-0.5) &&
                      b.coeff(parse_word("z1 z1"))(0, 0) == cd(0.0) && b.coeff(parse_word("z2 z2"))(0, 0) == cd(0.0);
    const bool ok = deg2 && worst <= cfg.bch_tol;
    json r = report_head("lab bch", cfg);
    r["maxdeg"] = maxdeg;
    r["terms"] = b.size();
    r["degree2_is_half_commutator"] = deg2;
    r["max_deviation"] = worst;
    r["sweep"] = sweep;
    r["crossover_norm_sum"] = crossover ? json(*crossover) : json(nullptr);
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_martin_shamovich(const Config& cfg, const Output& o, int maxdeg) {
    const MartinShamovichReport m = martin_shamovich_check(maxdeg, cfg.divergence_N);
    const bool ok = m.matched_through == maxdeg && m.product_deviation < 1e-12 && m.growth_ratio > 10 &&
                    m.log_inside_ok && m.log_at_branch_fails;
    json r = report_head("lab martin-shamovich", cfg);
    r["maxdeg"] = maxdeg;
    r["product_deviation"] = m.product_deviation;
    r["max_coeff_deviation"] = m.max_coeff_deviation;
    r["matched_through"] = m.matched_through;
    r["divergence_N"] = m.divergence_N;
    r["partial_sum_max_at_1.8i"] = m.partial_inside;
    r["partial_sum_max_at_2.2i"] = m.partial_outside;
    r["growth_ratio"] = m.growth_ratio;
    r["log_defined_at_1.8i"] = m.log_inside_ok;
    r["log_branch_violation_at_2i"] = m.log_at_branch_fails;
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_triangular(const Config& cfg, const Output& o, const std::string& expr_file, const std::string& x_file,
                   const std::string& y_file, const std::string& c_text) {
    const ExprPtr e = read_expr_file(expr_file);
    const cd c = complex_from_json(json(c_text));
    const TriangularReport t = triangular_continuation_check(*e, read_point(x_file), read_point(y_file), c);
    const bool ok = t.deviation <= cfg.triangular_tol;
    json r = report_head("lab triangular", cfg);
    r["expr"] = to_string(*e);
    r["c"] = to_json(c);
    r["deviation"] = t.deviation;
    r["off_diagonal_norm"] = t.off_diagonal;
    r["verdict"] = ok ? "PASS" : "FAIL";
    emit(o, r);
    return ok ? 0 : 1;
}

int cmd_conjugate(const Config& cfg, const Output& o, const std::string& series_file) {
    const NCSeries u = read_series(series_file);
    json r = report_head("conjugate", cfg);
    if (auto w = first_mixed_word(u)) {
        r["verdict"] = "NotPluriharmonic";
        r["witness_word"] = format_word(*w);
        r["witness_coeff"] = to_json(u.coeff(*w));
        emit(o, r);
        return 1;
    }
    const NCSeries f = pluriharmonic_conjugate(u);
    r["verdict"] = "Pluriharmonic";
    r["analytic"] = to_json(f);
    // u + i v = f, so v = (f - f^*) / 2i
    r["conjugate"] = to_json(scalar_mul(cd(0, -0.5), f - series_adjoint(f)));
    emit(o, r);
    return 0;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input:
        case ErrorKind::parse_error:
        case ErrorKind::unknown_identifier:
        case ErrorKind::dimension_mismatch: return 2;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free noncommutative function calculus"};
    app.require_subcommand(1);
    Config cfg;
    Output out;
    std::optional<std::string> config_file;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    app.add_option("--config", config_file, "JSON file with tolerances and seeds");
    app.add_option("--format", out.format, "report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", seed, "root seed (overrides the config)");
    app.add_option("--workers", workers, "sampler threads (overrides the config)")->check(CLI::PositiveNumber);
    app.add_option("--report", out.out, "write the report to a file");

    std::string expr_file, point_file, dir_file, series_file, real_file, path_file, op = "hessian", realize_out;
    std::string x_file, y_file, c_text = "1";
    int N = 0, maxdeg = 0, samples = 20;
    bool fd = false, symbolic = false, sample = false;
    std::optional<std::string> csv, cont_out;
    std::optional<std::uint64_t> rotation;

    auto* eval = app.add_subcommand("eval", "evaluate an expression at a point");
    eval->add_option("--expr", expr_file)->required();
    eval->add_option("--point", point_file)->required();

    auto* diff = app.add_subcommand("diff", "derivative operators");
    diff->add_option("--expr", expr_file)->required();
    diff->add_option("--op", op)->check(CLI::IsMember({"D", "Dstar", "hessian", "DR", "DR2"}));
    auto* f1 = diff->add_flag("--fd", fd, "finite differences");
    auto* f2 = diff->add_flag("--symbolic", symbolic, "expand and differentiate (default)");
    f1->excludes(f2);
    diff->add_option("--point", point_file)->required();
    diff->add_option("--dir", dir_file)->required();
    diff->add_option("--maxdeg", maxdeg, "expansion degree for the symbolic route");

    auto* cert = app.add_subcommand("certify-psh", "middle-matrix certificate");
    cert->add_option("--series", series_file)->required();
    cert->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    cert->add_flag("--sample", sample, "also run the Hessian sampler");

    auto* realize = app.add_subcommand("realize", "build the realization");
    realize->add_option("--series", series_file)->required();
    realize->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    realize->add_option("--out", realize_out)->required();
    realize->add_option("--rotate", rotation, "rotate the Gram coordinates by a seeded unitary");

    auto* verify = app.add_subcommand("verify-realization", "check a realization against its series");
    verify->add_option("--realization", real_file)->required();
    verify->add_option("--series", series_file)->required();
    verify->add_option("--samples", samples);
    verify->add_option("--seed", seed);

    auto* cont = app.add_subcommand("continue", "continue a realization along a path");
    cont->add_option("--realization", real_file)->required();
    cont->add_option("--path", path_file)->required();
    cont->add_option("--out", cont_out);
    cont->add_option("--maxdeg", maxdeg, "expansion degree of the continued series");

    auto* lab = app.add_subcommand("lab", "experiments");
    lab->require_subcommand(1);
    auto* logr = lab->add_subcommand("log-radius", "radius of log f");
    logr->add_option("--N", N)->required();
    logr->add_option("--csv", csv);
    auto* bch = lab->add_subcommand("bch", "truncated BCH series");
    bch->add_option("--maxdeg", maxdeg)->required();
    auto* ms = lab->add_subcommand("martin-shamovich", "nilpotent substitution into BCH");
    ms->add_option("--maxdeg", maxdeg)->required();
    auto* tri = lab->add_subcommand("triangular", "similarity identity on a triangular point");
    tri->add_option("--expr", expr_file)->required();
    tri->add_option("--X", x_file)->required();
    tri->add_option("--Y", y_file)->required();
    tri->add_option("--c", c_text);

    auto* conj = app.add_subcommand("conjugate", "pluriharmonic conjugate");
    conj->add_option("--series", series_file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (config_file) cfg.load(read_json_file(*config_file));
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        require(!cfg.sizes.empty(), ErrorKind::invalid_input, "config sizes must not be empty");

        if (*eval) return cmd_eval(cfg, out, expr_file, point_file);
        if (*diff) return cmd_diff(cfg, out, expr_file, op, fd, point_file, dir_file, maxdeg);
        if (*cert) return cmd_certify(cfg, out, series_file, N, sample);
        if (*realize) return cmd_realize(cfg, out, series_file, N, realize_out, rotation);
        if (*verify) return cmd_verify(cfg, out, real_file, series_file, samples);
        if (*cont) return cmd_continue(cfg, out, real_file, path_file, cont_out, maxdeg);
        if (*logr) return cmd_log_radius(cfg, out, N, csv);
        if (*bch) return cmd_bch(cfg, out, maxdeg);
        if (*ms) return cmd_martin_shamovich(cfg, out, maxdeg);
        if (*tri) return cmd_triangular(cfg, out, expr_file, x_file, y_file, c_text);
        if (*conj) return cmd_conjugate(cfg, out, series_file);
    } catch (const Error& e) {
        std::cerr << json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << json{{"error", "InvalidInput"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }
    return 2;
}
