#include "spincs/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace spincs;

namespace {

struct ComputeArgs {
    std::string op;
    std::string state;
    std::string poly;
    int N = 1;
    int s = 0;
    int a = 1, b = 1, n = 0, i = 1;
    std::string beta = "b";
    std::string form;
    std::string sign;
    std::string space = "anti";
    int degree = 0;
    int order = 3;
    bool json = false;
};

// Parse failures quote the literal with a caret under the offending position.
int report_parse_error(const std::string& flag, const std::string& text, const ParseError& e) {
    std::cerr << "error: cannot parse " << flag << ": " << e.what() << "\n  " << text << "\n  "
              << std::string(std::min(e.position(), text.size()), ' ') << "^\n";
    return 2;
}

int infer_colors(const FockVector& v) {
    int s = 1;
    for (const auto& [st, c] : v) s = std::max(s, st.max_color());
    return s;
}

int infer_colors(const PolySym& v) {
    int s = 1;
    for (const auto& [m, c] : v)
        for (const auto& [key, e] : m.pw) s = std::max(s, key.first);
    return s;
}

ordered_json fock_json(const FockVector& v) {
    ordered_json terms = ordered_json::array();
    for (const auto& [st, c] : v) terms.push_back({{"coefficient", c.str()}, {"state", st.str()}});
    return terms;
}

ordered_json poly_json(const SpinPolynomial& p) {
    ordered_json terms = ordered_json::array();
    for (const auto& [m, c] : p) {
        SpinPolynomial one(p.N(), p.s());
        one.add(m, ParamScalar(1));
        terms.push_back({{"coefficient", c.str()}, {"monomial", one.str()}});
    }
    return terms;
}

ordered_json polysym_json(const PolySym& v) {
    ordered_json terms = ordered_json::array();
    for (const auto& [m, c] : v) terms.push_back({{"coefficient", c.str()}, {"monomial", m.str()}});
    return terms;
}

YangianSign parse_sign(const std::string& x, YangianSign fallback) {
    if (x.empty()) return fallback;
    if (x == "+" || x == "plus") return YangianSign::Plus;
    if (x == "-" || x == "minus") return YangianSign::Minus;
    throw std::invalid_argument("sign must be + or -");
}

int emit(const ComputeArgs& A, ordered_json j, const std::string& text) {
    if (A.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text << "\n";
    return 0;
}

int run_compute(const ComputeArgs& A) {
    ParamScalar beta;
    try {
        beta = ParamScalar::parse(A.beta);
    } catch (const ParseError& e) {
        return report_parse_error("--beta", A.beta, e);
    }
    if (beta.is_zero()) throw std::invalid_argument("beta must be nonzero");
    ordered_json j{{"op", A.op}};

    if (A.op == "pi_N" || A.op == "T" || A.op == "T_apply") {
        FockVector v;
        try {
            v = parse_fock(A.state);
        } catch (const ParseError& e) {
            return report_parse_error("--state", A.state, e);
        }
        int s = A.s ? A.s : infer_colors(v);
        j["state"] = fock_str(v);
        j["s"] = s;
        if (A.op == "pi_N") {
            SpinPolynomial p = pi_N(v, A.N, s);
            j["N"] = A.N;
            j["result"] = p.str();
            j["terms"] = poly_json(p);
            return emit(A, j, p.str());
        }
        TForm form = A.form.empty() ? TForm::Compositional : parse_tform(A.form);
        DensityRepository repo;
        if (form != TForm::Compositional) repo = DensityRepository::load_dir(default_density_dir());
        TApplyResult r = T_apply(repo, A.a, A.b, A.n, form, s, v, beta);
        j.update({{"a", A.a}, {"b", A.b}, {"n", A.n}, {"form", to_string(form)}, {"beta", beta.str()}});
        j["result"] = fock_str(r.value);
        j["terms"] = fock_json(r.value);
        j["used_compositional_t20"] = r.used_compositional_t20;
        if (form == TForm::Compositional || r.used_compositional_t20) {
            j["stable"] = r.stable;
            j["cutoff"] = r.cutoff;
            if (!r.stable) {
                std::cerr << "error: compositional value did not stabilize up to cutoff " << r.cutoff << "\n";
                return 3;
            }
        }
        return emit(A, j, fock_str(r.value));
    }

    if (A.op == "pi_bar_N" || A.op == "T_bose_apply" || A.op == "T_bose") {
        PolySym v;
        try {
            v = parse_polysym(A.state);
        } catch (const ParseError& e) {
            return report_parse_error("--state", A.state, e);
        }
        int s = A.s ? A.s : infer_colors(v);
        j["state"] = polysym_str(v);
        j["s"] = s;
        if (A.op == "pi_bar_N") {
            SpinPolynomial p = pi_bar_N(v, A.N, s);
            j["N"] = A.N;
            j["result"] = p.str();
            j["terms"] = poly_json(p);
            return emit(A, j, p.str());
        }
        BoseDForm form = BoseDForm::Kernel;
        if (A.form == "divided") form = BoseDForm::DividedDifference;
        else if (!A.form.empty() && A.form != "kernel") throw std::invalid_argument("bosonic form must be kernel or divided");
        PolySym r = T_bose_apply(A.a, A.b, A.n, s, v, beta, form);
        j.update({{"a", A.a}, {"b", A.b}, {"n", A.n}, {"form", form == BoseDForm::Kernel ? "kernel" : "divided"},
                  {"beta", beta.str()}});
        j["result"] = polysym_str(r);
        j["terms"] = polysym_json(r);
        return emit(A, j, polysym_str(r));
    }

    if (A.op == "dunkl_apply" || A.op == "dunkl") {
        const std::string& text = A.poly.empty() ? A.state : A.poly;
        int s = A.s ? A.s : 1;
        SpinPolynomial p(0, s);
        try {
            p = SpinPolynomial::parse(text, s, A.N);
        } catch (const ParseError& e) {
            return report_parse_error("--poly", text, e);
        }
        SpinPolynomial r = dunkl_apply(A.i, p, beta);
        j.update({{"poly", p.str()}, {"i", A.i}, {"beta", beta.str()}, {"result", r.str()}, {"terms", poly_json(r)}});
        return emit(A, j, r.str());
    }

    if (A.op == "qdet_coeffs" || A.op == "qdet") {
        int s = A.s ? A.s : 2;
        int space = A.space == "sym" ? 1 : -1;
        if (A.space != "sym" && A.space != "anti") throw std::invalid_argument("space must be sym or anti");
        YangianSign sign = parse_sign(A.sign, space < 0 ? YangianSign::Minus : YangianSign::Plus);
        QdetResult Q = qdet_coeffs(A.N, s, A.degree, A.order, sign, beta, space);
        ordered_json basis = ordered_json::array();
        for (const auto& rep : Q.basis.reps) {
            SpinPolynomial one(A.N, s);
            one.add(rep, ParamScalar(1));
            basis.push_back(one.str());
        }
        ordered_json coeffs = ordered_json::array();
        std::ostringstream text;
        text << "basis:";
        for (const auto& b : basis) text << " [" << b.get<std::string>() << "]";
        text << "\n";
        for (std::size_t r = 0; r < Q.coeffs.size(); ++r) {
            ordered_json rows = ordered_json::array();
            text << "u^-" << r << ":\n";
            for (std::size_t i = 0; i < Q.coeffs[r].rows(); ++i) {
                ordered_json row = ordered_json::array();
                text << " ";
                for (std::size_t k = 0; k < Q.coeffs[r].cols(); ++k) {
                    std::string x = Q.coeffs[r](i, k).str();
                    row.push_back(x);
                    text << " " << (x.find(' ') == std::string::npos ? x : "(" + x + ")");
                }
                text << "\n";
                rows.push_back(row);
            }
            coeffs.push_back(rows);
        }
        for (const auto& w : Q.warnings) std::cerr << "warning: " << w << "\n";
        j.update({{"N", A.N}, {"s", s}, {"degree", A.degree}, {"order", A.order}, {"space", A.space},
                  {"sign", to_string(sign)}, {"beta", beta.str()}, {"basis", basis}, {"coefficients", coeffs}});
        std::string t = text.str();
        if (!t.empty() && t.back() == '\n') t.pop_back();
        return emit(A, j, t);
    }

    throw std::invalid_argument("unknown operation " + A.op);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification tools for spin Calogero-Sutherland operators on Fock space"};
    app.require_subcommand(1);

    auto* suite = app.add_subcommand("suite", "verification suites");
    suite->require_subcommand(1);
    auto* run = suite->add_subcommand("run", "run the suites selected by a config file");
    std::string config_path, output_path;
    bool progress = false;
    run->add_option("--config", config_path, "key-value config file")->required();
    run->add_option("--output", output_path, "write the JSON report here instead of stdout");
    run->add_flag("--progress", progress, "print one status line per check to stderr");

    auto* compute = app.add_subcommand("compute", "evaluate one operation");
    ComputeArgs A;
    compute->add_option("op", A.op, "pi_N | pi_bar_N | T | T_bose_apply | dunkl_apply | qdet_coeffs")->required();
    compute->add_option("--state", A.state, "Fock vector or polysymmetric literal");
    compute->add_option("--poly", A.poly, "spin polynomial literal (dunkl_apply)");
    compute->add_option("--N", A.N, "number of variables");
    compute->add_option("--s", A.s, "number of colors (inferred from the literal when omitted)");
    compute->add_option("--a", A.a, "first color index");
    compute->add_option("--b", A.b, "second color index");
    compute->add_option("--n", A.n, "mode order");
    compute->add_option("--i", A.i, "Dunkl slot");
    compute->add_option("--beta", A.beta, "coupling: b for symbolic, or a nonzero rational");
    compute->add_option("--form", A.form, "NORMAL_ORDERED | RECURRENT | COMPOSITIONAL, or kernel | divided");
    compute->add_option("--sign", A.sign, "branch of the finite Yangian representation: + or -");
    compute->add_option("--space", A.space, "anti | sym (qdet_coeffs)");
    compute->add_option("--degree", A.degree, "polynomial degree (qdet_coeffs)");
    compute->add_option("--order", A.order, "series order (qdet_coeffs)");
    compute->add_flag("--json", A.json, "print JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            SuiteConfig cfg = load_config(config_path);
            SuiteReport R = run_suite(cfg, [&](const CheckDef& d, const ordered_json& j) {
                if (progress) std::cerr << j["status"].get<std::string>() << "  " << d.id << "\n";
            });
            std::string text = R.json.dump(2) + "\n";
            if (output_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(output_path);
                if (!out) throw std::runtime_error("cannot write " + output_path);
                out << text;
            }
            return R.any_failed ? 1 : 0;
        }
        return run_compute(A);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
