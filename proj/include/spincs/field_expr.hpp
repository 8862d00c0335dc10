#pragma once

#include "spincs/fieldcalc.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spincs {

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
    bool atom = false;
    std::string text;
    std::vector<SExpr> kids;
    std::size_t pos = 0;

    bool is(const std::string& head) const { return !atom && !kids.empty() && kids[0].atom && kids[0].text == head; }
    const std::string& head() const {
        static const std::string none;
        return (!atom && !kids.empty() && kids[0].atom) ? kids[0].text : none;
    }
    std::string str() const {
        if (atom) return text;
        std::string out = "(";
        for (std::size_t i = 0; i < kids.size(); ++i) out += (i ? " " : "") + kids[i].str();
        return out + ")";
    }
};

inline std::vector<SExpr> parse_sexprs(std::string_view text) {
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) { throw ParseError(msg, i); };
    auto skip = [&]() {
        while (i < text.size()) {
            if (std::isspace(static_cast<unsigned char>(text[i]))) {
                ++i;
            } else if (text[i] == ';') {
                while (i < text.size() && text[i] != '\n') ++i;
            } else {
                break;
            }
        }
    };
    std::function<SExpr()> one = [&]() -> SExpr {
        skip();
        if (i >= text.size()) fail("unexpected end of input");
        SExpr e;
        e.pos = i;
        if (text[i] == '(') {
            ++i;
            for (;;) {
                skip();
                if (i >= text.size()) fail("unbalanced '('");
                if (text[i] == ')') {
                    ++i;
                    return e;
                }
                e.kids.push_back(one());
            }
        }
        if (text[i] == ')') fail("unexpected ')'");
        e.atom = true;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
               text[i] != ')' && text[i] != ';')
            e.text += text[i++];
        return e;
    };
    std::vector<SExpr> out;
    for (skip(); i < text.size(); skip()) out.push_back(one());
    return out;
}

// ---------------------------------------------------------------------------
// Field expressions

enum class FKind { Psi, PsiStar, ZPow, Zd, Split, MSplit, Mul, Add, Scale, NO, CSum, E, T, Int, One };

// Scalar of the form c1 * s + c0.
struct SLinear {
    Rational c1 = 0;
    Rational c0 = 1;
    Rational at(int s) const { return c1 * s + c0; }
};

struct FieldExpr;
using FieldExprPtr = std::shared_ptr<const FieldExpr>;

struct FieldExpr {
    FKind kind = FKind::One;
    std::string c1, c2;  // color references: a symbol bound by the environment or a literal
    int k = 0, l = 0;    // density labels; for ZPow, k is the power
    std::string part;    // total | prime | dprime
    char sign = '+';
    SLinear coef;
    Kernel kernel;
    Regime regime = Regime::Around;
    std::string bound;  // summation variable of csum
    std::vector<FieldExprPtr> kids;
    std::size_t pos = 0;

    int parity() const {
        switch (kind) {
            case FKind::Psi:
            case FKind::PsiStar: return 1;
            case FKind::ZPow:
            case FKind::E:
            case FKind::T:
            case FKind::One: return 0;
            case FKind::Mul:
            case FKind::Int: {
                int p = 0;
                for (const auto& x : kids) p += x->parity();
                return p & 1;
            }
            case FKind::Add: {
                int p = kids.empty() ? 0 : kids[0]->parity();
                for (const auto& x : kids)
                    if (x->parity() != p) throw std::invalid_argument("sum with mixed parity");
                return p;
            }
            default: return kids.at(0)->parity();
        }
    }
};

using ColorEnv = std::map<std::string, int>;

inline int resolve_color(const std::string& ref, const ColorEnv& env) {
    if (!ref.empty() && std::isdigit(static_cast<unsigned char>(ref[0]))) return std::stoi(ref);
    auto it = env.find(ref);
    if (it == env.end()) throw std::invalid_argument("unbound color symbol '" + ref + "'");
    return it->second;
}

namespace detail {

inline int atom_int(const SExpr& e) {
    if (!e.atom) throw ParseError("expected integer", e.pos);
    try {
        std::size_t used = 0;
        int v = std::stoi(e.text, &used);
        if (used != e.text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected integer, got '" + e.text + "'", e.pos);
    }
}

inline SLinear parse_coef(const SExpr& e) {
    SLinear c;
    if (e.atom) {
        c.c0 = parse_rational(e.text);
        return c;
    }
    if (e.is("lin-s") && e.kids.size() == 3 && e.kids[1].atom && e.kids[2].atom) {
        c.c1 = parse_rational(e.kids[1].text);
        c.c0 = parse_rational(e.kids[2].text);
        return c;
    }
    throw ParseError("bad coefficient " + e.str(), e.pos);
}

}  // namespace detail

inline FieldExprPtr parse_field_expr(const SExpr& e) {
    auto node = std::make_shared<FieldExpr>();
    node->pos = e.pos;
    auto fail = [&](const std::string& msg) -> FieldExprPtr {
        throw ParseError(msg + ": " + e.str(), e.pos);
    };
    if (e.atom) {
        if (e.text == "one") return node;
        return fail("unexpected atom");
    }
    const std::string& h = e.head();
    const auto& k = e.kids;
    auto sub = [&](std::size_t from) {
        for (std::size_t i = from; i < k.size(); ++i) node->kids.push_back(parse_field_expr(k[i]));
    };
    if (h == "psi" || h == "psis") {
        if (k.size() != 2 || !k[1].atom) return fail("field needs one color");
        node->kind = h == "psi" ? FKind::Psi : FKind::PsiStar;
        node->c1 = k[1].text;
    } else if (h == "zpow") {
        if (k.size() != 2) return fail("zpow needs an exponent");
        node->kind = FKind::ZPow;
        node->k = detail::atom_int(k[1]);
    } else if (h == "zd" || h == "no") {
        if (k.size() != 2) return fail(h + " takes one argument");
        node->kind = h == "zd" ? FKind::Zd : FKind::NO;
        sub(1);
    } else if (h == "split" || h == "msplit") {
        if (k.size() != 3 || !k[1].atom || (k[1].text != "+" && k[1].text != "-")) return fail("split needs + or -");
        node->kind = h == "split" ? FKind::Split : FKind::MSplit;
        node->sign = k[1].text[0];
        sub(2);
        if (node->kind == FKind::MSplit && node->kids[0]->kind != FKind::Psi && node->kids[0]->kind != FKind::PsiStar)
            return fail("mode split applies to basic fields only");
    } else if (h == "mul" || h == "add") {
        node->kind = h == "mul" ? FKind::Mul : FKind::Add;
        sub(1);
    } else if (h == "scale") {
        if (k.size() != 3) return fail("scale needs a coefficient and an expression");
        node->kind = FKind::Scale;
        node->coef = detail::parse_coef(k[1]);
        sub(2);
    } else if (h == "csum") {
        if (k.size() != 3 || !k[1].atom) return fail("csum needs a variable and an expression");
        node->kind = FKind::CSum;
        node->bound = k[1].text;
        sub(2);
    } else if (h == "E") {
        if (k.size() != 3 || !k[1].atom || !k[2].atom) return fail("E needs two colors");
        node->kind = FKind::E;
        node->c1 = k[1].text;
        node->c2 = k[2].text;
    } else if (h == "T") {
        if (k.size() < 5 || k.size() > 6 || !k[3].atom || !k[4].atom) return fail("T needs k l x y [part]");
        node->kind = FKind::T;
        node->k = detail::atom_int(k[1]);
        node->l = detail::atom_int(k[2]);
        node->c1 = k[3].text;
        node->c2 = k[4].text;
        node->part = k.size() == 6 ? k[5].text : "total";
    } else if (h == "int") {
        // (int (kernel coef a b k) REGIME Zfactor Wfactor)
        if (k.size() != 5 || !k[1].is("kernel") || k[1].kids.size() != 5 || !k[2].atom)
            return fail("int needs (kernel coef a b k) REGIME Z W");
        node->kind = FKind::Int;
        node->kernel.coef = parse_rational(k[1].kids[1].text);
        node->kernel.a = detail::atom_int(k[1].kids[2]);
        node->kernel.b = detail::atom_int(k[1].kids[3]);
        node->kernel.k = detail::atom_int(k[1].kids[4]);
        try {
            node->regime = parse_regime(k[2].text);
        } catch (const std::invalid_argument&) {
            return fail("unknown regime");
        }
        sub(3);
    } else {
        return fail("unknown form '" + h + "'");
    }
    return node;
}

inline FieldExprPtr parse_field_expr(std::string_view text) {
    auto all = parse_sexprs(text);
    if (all.size() != 1) throw ParseError("expected exactly one expression", 0);
    return parse_field_expr(all[0]);
}

// ---------------------------------------------------------------------------
// Flattening a normal-ordered expression into monomials.

namespace detail {

inline std::vector<NOMonomial> flatten_no(const FieldExpr& e, const ColorEnv& env, int s) {
    std::vector<NOMonomial> out;
    switch (e.kind) {
        case FKind::One: out.emplace_back(); break;
        case FKind::Psi:
        case FKind::PsiStar: {
            NOMonomial m;
            m.factors.push_back({e.kind == FKind::Psi ? Species::Psi : Species::PsiStar, resolve_color(e.c1, env)});
            out.push_back(std::move(m));
            break;
        }
        case FKind::ZPow: {
            NOMonomial m;
            m.zpow = e.k;
            out.push_back(std::move(m));
            break;
        }
        case FKind::NO: return flatten_no(*e.kids[0], env, s);
        case FKind::Zd:
        case FKind::Split:
        case FKind::MSplit:
            for (auto m : flatten_no(*e.kids[0], env, s)) {
                NOBlock blk{0, static_cast<int>(m.factors.size()), m.zpow};
                if (e.kind == FKind::Zd)
                    m.weights.push_back(blk);
                else
                    m.splits.emplace_back(blk, e.sign);  // the two splittings agree on basic fields
                out.push_back(std::move(m));
            }
            break;
        case FKind::Scale:
            for (auto m : flatten_no(*e.kids[0], env, s)) {
                m.coef *= e.coef.at(s);
                if (m.coef != 0) out.push_back(std::move(m));
            }
            break;
        case FKind::Add:
            for (const auto& x : e.kids)
                for (auto& m : flatten_no(*x, env, s)) out.push_back(std::move(m));
            break;
        case FKind::CSum:
            for (int c = 1; c <= s; ++c) {
                ColorEnv env2 = env;
                env2[e.bound] = c;
                for (auto& m : flatten_no(*e.kids[0], env2, s)) out.push_back(std::move(m));
            }
            break;
        case FKind::Mul: {
            out.emplace_back();
            for (const auto& x : e.kids) {
                auto rhs = flatten_no(*x, env, s);
                std::vector<NOMonomial> next;
                for (const auto& L : out)
                    for (const auto& R : rhs) {
                        NOMonomial m = L;
                        int off = static_cast<int>(L.factors.size());
                        m.coef *= R.coef;
                        m.zpow += R.zpow;
                        m.factors.insert(m.factors.end(), R.factors.begin(), R.factors.end());
                        for (auto blk : R.weights) m.weights.push_back({blk.lo + off, blk.hi + off, blk.zconst});
                        for (auto [blk, sg] : R.splits)
                            m.splits.emplace_back(NOBlock{blk.lo + off, blk.hi + off, blk.zconst}, sg);
                        next.push_back(std::move(m));
                    }
                out = std::move(next);
            }
            break;
        }
        default:
            throw std::invalid_argument("node not allowed inside a normal-ordered form (offset " +
                                        std::to_string(e.pos) + ")");
    }
    return out;
}

}  // namespace detail

// Only globally normal-ordered input is accepted: the root must be a (no ...) node.
inline std::vector<NOMonomial> flatten_normal_ordered(const FieldExpr& e, const ColorEnv& env, int s) {
    if (e.kind != FKind::NO) throw std::invalid_argument("expression is not under a global normal ordering");
    return detail::flatten_no(e, env, s);
}

// eval_no_expr: coefficient at z^e of the normal-ordered expression applied to v.
inline FockVector eval_no_expr(const FieldExpr& e, const ColorEnv& env, int s, int exponent, const FockVector& v) {
    auto ms = flatten_normal_ordered(e, env, s);
    FockVector out;
    for (const auto& [st, c] : v) out.add_scaled(eval_no(ms, exponent, st), c);
    return out;
}

// ---------------------------------------------------------------------------
// Density repository: versioned data files with both Appendix forms.

enum class DensityForm { NormalOrdered, Recurrent };

struct DensityDef {
    int k = 0, l = 0;
    std::string part = "total";
    bool diag = false;
    FieldExprPtr normal_ordered;
    FieldExprPtr recurrent;
    std::string source;
};

inline DensityDef parse_density(std::string_view text, const std::string& source = "<string>") {
    auto all = parse_sexprs(text);
    if (all.size() != 1 || !all[0].is("density")) throw ParseError(source + ": expected one (density ...) form", 0);
    DensityDef d;
    d.source = source;
    bool version_ok = false;
    for (std::size_t i = 1; i < all[0].kids.size(); ++i) {
        const SExpr& f = all[0].kids[i];
        const std::string& h = f.head();
        if (f.kids.size() != 2) throw ParseError(source + ": malformed field " + f.str(), f.pos);
        if (h == "version") version_ok = detail::atom_int(f.kids[1]) == 1;
        else if (h == "k") d.k = detail::atom_int(f.kids[1]);
        else if (h == "l") d.l = detail::atom_int(f.kids[1]);
        else if (h == "part") d.part = f.kids[1].text;
        else if (h == "diag") d.diag = f.kids[1].text == "yes";
        else if (h == "normal-ordered") d.normal_ordered = parse_field_expr(f.kids[1]);
        else if (h == "recurrent") d.recurrent = parse_field_expr(f.kids[1]);
        else if (h != "name") throw ParseError(source + ": unknown field " + h, f.pos);
    }
    if (!version_ok) throw ParseError(source + ": unsupported or missing version", 0);
    return d;
}

class DensityRepository {
public:
    DensityRepository() = default;

    static DensityRepository load_dir(const std::filesystem::path& dir) {
        DensityRepository repo;
        if (!std::filesystem::is_directory(dir)) throw std::runtime_error("density directory not found: " + dir.string());
        std::vector<std::filesystem::path> files;
        for (const auto& ent : std::filesystem::directory_iterator(dir))
            if (ent.path().extension() == ".sexp") files.push_back(ent.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files) {
            std::ifstream in(p);
            std::stringstream ss;
            ss << in.rdbuf();
            repo.add(parse_density(ss.str(), p.filename().string()));
        }
        return repo;
    }

    void add(DensityDef d) {
        auto key = std::make_tuple(d.k, d.l, d.part, d.diag);
        defs_[key] = std::move(d);
    }

    bool has(int k, int l, const std::string& part, bool diag) const {
        return defs_.count(std::make_tuple(k, l, part, diag)) > 0;
    }

    const DensityDef& get(int k, int l, const std::string& part, bool diag) const {
        auto it = defs_.find(std::make_tuple(k, l, part, diag));
        if (it == defs_.end())
            throw std::out_of_range("no density T^{" + std::to_string(k) + "," + std::to_string(l) + "} " + part +
                                    (diag ? " diagonal" : " off-diagonal"));
        return it->second;
    }

    std::vector<const DensityDef*> all() const {
        std::vector<const DensityDef*> out;
        for (const auto& [key, d] : defs_) out.push_back(&d);
        return out;
    }

    // T^{k,l}_{ab}(z) as a field, with a "total" T^{1,1} assembled from its two parts.
    OpField density_field(int k, int l, const std::string& part, int a, int b, int s, DensityForm form) const {
        auto key = std::make_tuple(k, l, part, a, b, s, form == DensityForm::Recurrent);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        OpField f;
        bool diag = a == b;
        if (!has(k, l, part, diag) && part == "total" && has(k, l, "prime", diag)) {
            f = sum_fields({{ParamScalar(1), density_field(k, l, "prime", a, b, s, form)},
                            {ParamScalar(1), density_field(k, l, "dprime", a, b, s, form)}},
                           "T" + std::to_string(k) + std::to_string(l));
        } else {
            const DensityDef& d = get(k, l, part, diag);
            ColorEnv env{{"a", a}, {"b", b}};
            std::string name = "T^{" + std::to_string(k) + "," + std::to_string(l) + "}" + (part == "total" ? "" : part) +
                               "_" + std::to_string(a) + std::to_string(b);
            if (form == DensityForm::NormalOrdered) {
                if (!d.normal_ordered) throw std::out_of_range("density has no normal-ordered form");
                f = no_field(flatten_normal_ordered(*d.normal_ordered, env, s), name, 0, -1);
            } else {
                if (!d.recurrent) throw std::out_of_range("density has no recurrent form");
                f = compile(*d.recurrent, env, s);
            }
        }
        cache_.emplace(key, f);
        return f;
    }

    // Recurrent forms: affine generators, density references and kernel integrals.
    OpField compile(const FieldExpr& e, const ColorEnv& env, int s) const {
        switch (e.kind) {
            case FKind::Psi: return psi_field(resolve_color(e.c1, env));
            case FKind::PsiStar: return psi_star_field(resolve_color(e.c1, env));
            case FKind::ZPow: return zpow_field(e.k);
            case FKind::One: return zpow_field(0);
            case FKind::E: return E_field(resolve_color(e.c1, env), resolve_color(e.c2, env));
            case FKind::T:
                return density_field(e.k, e.l, e.part, resolve_color(e.c1, env), resolve_color(e.c2, env), s,
                                     DensityForm::Recurrent);
            case FKind::Zd: return euler_field(compile(*e.kids[0], env, s));
            case FKind::Split: return split_field(e.sign, compile(*e.kids[0], env, s));
            case FKind::Scale: return scale_field(ParamScalar(e.coef.at(s)), compile(*e.kids[0], env, s));
            case FKind::Add: {
                std::vector<std::pair<ParamScalar, OpField>> terms;
                for (const auto& x : e.kids) terms.emplace_back(ParamScalar(1), compile(*x, env, s));
                return sum_fields(terms);
            }
            case FKind::CSum: {
                std::vector<std::pair<ParamScalar, OpField>> terms;
                for (int c = 1; c <= s; ++c) {
                    ColorEnv env2 = env;
                    env2[e.bound] = c;
                    terms.emplace_back(ParamScalar(1), compile(*e.kids[0], env2, s));
                }
                return sum_fields(terms);
            }
            case FKind::Mul: {
                // Only powers of z times a single field; genuine operator products go through int.
                int zp = 0;
                std::optional<OpField> f;
                for (const auto& x : e.kids) {
                    if (x->kind == FKind::ZPow) {
                        zp += x->k;
                    } else {
                        if (f) throw std::invalid_argument("product of fields at one point outside an integral");
                        f = compile(*x, env, s);
                    }
                }
                return f ? zmul_field(zp, *f) : zpow_field(zp);
            }
            case FKind::Int: {
                auto opt = [&](const FieldExpr& x) -> std::optional<OpField> {
                    if (x.kind == FKind::One) return std::nullopt;
                    return compile(x, env, s);
                };
                return contour_pair(e.kernel, e.regime, opt(*e.kids[0]), opt(*e.kids[1]));
            }
            case FKind::NO: return no_field(flatten_normal_ordered(e, env, s), "no", e.parity(), -1);
            default: throw std::invalid_argument("node not allowed in a recurrent form");
        }
    }

    void clear_cache() const { cache_.clear(); }

private:
    std::map<std::tuple<int, int, std::string, bool>, DensityDef> defs_;
    mutable std::map<std::tuple<int, int, std::string, int, int, int, bool>, OpField> cache_;
};

inline std::filesystem::path default_density_dir() {
#ifdef SPINCS_DATA_DIR
    return std::filesystem::path(SPINCS_DATA_DIR) / "densities" / "v1";
#else
    return std::filesystem::path("data") / "densities" / "v1";
#endif
}

}  // namespace spincs
