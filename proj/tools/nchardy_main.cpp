// nchardy: noncommutative Hardy-space factorization toolkit (CLI)
//
// exit codes: 0 success, 1 numerical check failure, 2 usage / malformed input

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nchardy/io.hpp"
#include "nchardy/suites.hpp"

using namespace nchardy;

namespace {

void print_or_save(const json& j, const std::string& out, bool as_json) {
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << j.dump(2) << "\n";
    } else if (as_json) {
        std::cout << j.dump(2) << "\n";
    }
}

double parse_p(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

int run(int argc, char** argv) {
    CLI::App app{"noncommutative Hardy-space factorization toolkit"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable JSON output");

    std::string in_path, out_path, p_str = "2", out_prefix = "";
    double tol = -1.0, q = 2.0, r = 2.0, eps = 1e-2, popt = 2.0;
    std::uint64_t seed = 1;
    int budget = 400, samples = 20000;

    auto* det = app.add_subcommand("det", "Fuglede-Kadison determinant of an element");
    det->add_option("input", in_path, "element JSON file")->required();

    auto* phi_cmd = app.add_subcommand("phi", "conditional expectation onto the diagonal");
    phi_cmd->add_option("input", in_path)->required();
    phi_cmd->add_option("-o,--output", out_path, "write the result element here");

    auto* norm = app.add_subcommand("norm", "p-(quasi)norm of an element");
    norm->add_option("input", in_path)->required();
    norm->add_option("-p", p_str, "exponent p > 0, or 'inf'")->required();

    auto* factor = app.add_subcommand("factor", "factorizations");
    std::string kind;
    factor->add_option("kind", kind, "qr|szego|szego-proj|riesz|inner-outer|wilson|outer-scalar")
        ->required();
    factor->add_option("input", in_path)->required();
    factor->add_option("--p", popt, "exponent p");
    factor->add_option("--q", q, "exponent q");
    factor->add_option("--r", r, "exponent r");
    factor->add_option("--eps", eps, "Riesz norm slack");
    factor->add_option("--out-prefix", out_prefix, "write factor elements <prefix><name>.json");
    factor->add_option("--tol", tol, "override the pass/fail residual tolerance");

    auto* outer_test = app.add_subcommand("outer-test", "outer classification report");
    outer_test->add_option("input", in_path)->required();

    auto* szf = app.add_subcommand("szego-formula", "Szego infimum optimizer");
    szf->add_option("input", in_path)->required();
    szf->add_option("--p", popt, "exponent p");
    szf->add_option("--budget", budget, "gradient iterations per start");
    szf->add_option("--samples", samples, "Monte-Carlo cross-check samples");
    szf->add_option("--seed", seed, "random seed");

    auto* verify = app.add_subcommand("verify", "seeded verification suites");
    SuiteConfig cfg;
    std::vector<std::string> tol_kv;
    verify->add_option("--suite", cfg.suite, "suite name or 'all'");
    verify->add_option("--trials", cfg.trials, "trials per check");
    verify->add_option("--seed", cfg.seed, "random seed");
    verify->add_option("--blocks", cfg.blocks, "MatrixBlock flag, e.g. --blocks 1 1 2");
    verify->add_option("--torus-n", cfg.torus_n, "torus matrix dimension");
    verify->add_option("--degree", cfg.degree, "torus truncation degree");
    verify->add_option("--nodes", cfg.quad_nodes, "torus quadrature nodes");
    verify->add_option("--tol", tol_kv, "tolerance override name=value (repeatable)");
    verify->add_option("--output", cfg.output, "write the SuiteReport JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (det->parsed()) {
        const DetValue d = fk_det(load_element(in_path));
        if (as_json)
            std::cout << json{{"value", d.value}, {"floored", d.floored}}.dump() << "\n";
        else
            std::cout << d.value << (d.floored ? "  (floored: kernel at the singular-value floor)" : "")
                      << "\n";
        return 0;
    }
    if (phi_cmd->parsed()) {
        const Element r2 = phi(load_element(in_path));
        print_or_save(element_to_json(r2), out_path, true);
        return 0;
    }
    if (norm->parsed()) {
        std::cout << pnorm(load_element(in_path), parse_p(p_str)) << "\n";
        return 0;
    }
    if (outer_test->parsed()) {
        const OuterReport rep = is_outer(load_element(in_path));
        if (as_json) {
            std::cout << to_json(rep).dump(2) << "\n";
        } else {
            std::cout << "left: " << (rep.left ? "yes" : "no") << "  right: "
                      << (rep.right ? "yes" : "no") << "  bilateral: "
                      << (rep.bilateral ? "yes" : "no") << "\n"
                      << "Delta(h) = " << rep.det_h << "  Delta(Phi(h)) = " << rep.det_phi_h
                      << "  criterion: " << (rep.det_criterion ? "met" : "not met") << "\n"
                      << "ranks (left/right/bilateral/full): " << rep.rank_left << "/"
                      << rep.rank_right << "/" << rep.rank_bilateral << "/" << rep.rank_full
                      << (rep.rank_oracle_exact ? "" : "  [truncated oracle]") << "\n";
        }
        return 0;
    }
    if (szf->parsed()) {
        const Element w = load_element(in_path);
        SzegoReport rep = szego_infimum(w, popt, budget, seed);
        if (samples > 0 && !rep.oracle_value)
            rep.oracle_value = brute_force_infimum(w, popt, samples, seed);
        if (as_json) {
            std::cout << to_json(rep).dump(2) << "\n";
        } else {
            std::cout << "Delta(w) = " << rep.det_w << "\ninf estimate = " << rep.inf_estimate
                      << "  (relative gap " << rep.relative_gap << ")\n";
            if (rep.oracle_value) std::cout << "oracle = " << *rep.oracle_value << "\n";
        }
        return rep.inf_estimate >= rep.det_w - 1e-9 ? 0 : 1;
    }
    if (verify->parsed()) {
        for (const std::string& kv : tol_kv) {
            const auto pos = kv.find('=');
            if (pos == std::string::npos)
                throw std::invalid_argument("--tol expects name=value");
            cfg.tol_override[kv.substr(0, pos)] = std::stod(kv.substr(pos + 1));
        }
        const SuiteReport rep = run_suite(cfg);
        std::cout << format_suite_report(rep);
        if (!cfg.output.empty()) {
            std::ofstream f(cfg.output);
            if (!f) throw std::runtime_error("cannot write " + cfg.output);
            f << suite_report_to_json(rep).dump(2) << "\n";
        }
        return rep.all_pass() ? 0 : 1;
    }

    // factor subcommands
    const Element x = load_element(in_path);
    auto save = [&](const char* name, const Element& e) {
        if (!out_prefix.empty()) save_element(e, out_prefix + name + ".json");
    };
    auto finish_fr = [&](const FactorizationResult& fr, double pass_tol) {
        save("u", fr.unitary);
        save("h", fr.analytic);
        if (fr.analytic_inverse) save("h_inv", *fr.analytic_inverse);
        if (as_json) std::cout << to_json(fr).dump(2) << "\n";
        const double worst =
            std::max({fr.residuals.reconstruction, fr.residuals.unitarity,
                      fr.residuals.membership, fr.residuals.inverse_membership});
        if (!as_json)
            std::printf("reconstruction %.3e  unitarity %.3e  membership %.3e/%.3e\n",
                        fr.residuals.reconstruction, fr.residuals.unitarity,
                        fr.residuals.membership, fr.residuals.inverse_membership);
        return worst <= (tol > 0 ? tol : pass_tol) ? 0 : 1;
    };

    if (kind == "qr") return finish_fr(arveson_factor(x), 1e-10);
    if (kind == "szego") return finish_fr(szego_factor(x, popt, q), 1e-8);
    if (kind == "szego-proj") {
        const auto [fr, cert] = szego_factor_projection(x);
        if (as_json) {
            json j = to_json(fr);
            j["certificate"] = {{"modulus_in_D", cert.modulus_in_D},
                                {"orthogonality", cert.orthogonality},
                                {"phi_product", cert.phi_product},
                                {"gram_condition", cert.gram_condition},
                                {"y_full_support", cert.y_full_support}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::printf("certificates: |y| in D %.3e  orthogonality %.3e  Phi(h)Phi(h^-1) %.3e\n",
                        cert.modulus_in_D, cert.orthogonality, cert.phi_product);
        }
        save("u", fr.unitary);
        save("h", fr.analytic);
        const double worst = std::max({fr.residuals.reconstruction, cert.modulus_in_D,
                                       cert.orthogonality, cert.phi_product});
        return worst <= (tol > 0 ? tol : 1e-8) ? 0 : 1;
    }
    if (kind == "riesz") {
        const RieszResult rr = riesz_factor(x, q, r, eps);
        save("y", rr.y);
        save("z", rr.z);
        if (as_json)
            std::cout << to_json(rr).dump(2) << "\n";
        else
            std::printf("|y|_q |z|_r = %.12g  vs  |x|_p + eps = %.12g  (slack %.3e)\n",
                        rr.norm_y * rr.norm_z, rr.norm_x + eps, rr.bound_slack);
        return (rr.reconstruction <= 1e-8 && rr.bound_slack <= 1e-8) ? 0 : 1;
    }
    if (kind == "inner-outer") {
        const InnerOuterResult io = inner_outer(x);
        save("inner", io.inner);
        save("outer", io.outer);
        if (!as_json)
            std::printf("reconstruction %.3e  inner unitarity %.3e  inner membership %.3e\n",
                        io.reconstruction, io.inner_unitarity, io.inner_membership);
        const double worst = std::max({io.reconstruction, io.inner_unitarity, io.inner_membership});
        return worst <= (tol > 0 ? tol : 1e-8) ? 0 : 1;
    }
    if (kind == "wilson") {
        const WilsonResult wr = wilson_factor(x);
        save("h", wr.factor);
        if (!as_json)
            std::printf("iterations %d  sup residual %.3e  det certificate gap %.3e\n",
                        wr.iterations, wr.sup_residual, wr.det_certificate_gap);
        return (wr.converged && wr.sup_residual <= (tol > 0 ? tol : 1e-8)) ? 0 : 1;
    }
    if (kind == "outer-scalar") {
        const ScalarOuterResult sr = outer_factor_scalar(x);
        save("h", sr.outer);
        if (!as_json)
            std::printf("modulus residual %.3e  negative defect %.3e  det certificate %.3e\n",
                        sr.modulus_residual, sr.negative_defect, sr.det_certificate_gap);
        return (sr.modulus_residual <= (tol > 0 ? tol : 1e-6)) ? 0 : 1;
    }
    std::cerr << "unknown factor kind '" << kind << "'\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
