#include "relo/localmip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace relo::mip {

namespace {

constexpr double kTol = 1e-9;
constexpr double kIndicatorEps = 1e-6;

// Budgets are accounted in search nodes rather than wall time so that
// budget-truncated solves stay bit-reproducible across runs and machines.
// The conversion is calibrated to roughly one millisecond per 4000 nodes.
long budget_nodes(double time_budget_ms) {
    const double nodes = time_budget_ms * 4000.0;
    if (nodes >= 9e18) return std::numeric_limits<long>::max();
    return std::max(1024L, static_cast<long>(nodes));
}

double affine_value(const Affine& a, std::span<const long> x) {
    double v = a.constant;
    for (const auto& term : a.terms) v += term.coeff * x[term.var];
    return v;
}

// interval of an affine expression over current variable domains
std::pair<double, double> affine_range(const Affine& a, std::span<const long> lb,
                                       std::span<const long> ub) {
    double lo = a.constant, hi = a.constant;
    for (const auto& term : a.terms) {
        if (term.coeff >= 0.0) {
            lo += term.coeff * lb[term.var];
            hi += term.coeff * ub[term.var];
        } else {
            lo += term.coeff * ub[term.var];
            hi += term.coeff * lb[term.var];
        }
    }
    return {lo, hi};
}

double piecewise_upper(double lo, double hi, double threshold) {
    if (hi < threshold) return hi;        // always active
    if (lo >= threshold) return 0.0;      // never active
    return std::max(0.0, std::min(hi, threshold));
}

}  // namespace

int IntegerProgram::add_var(const std::string& name, long lb, long ub, bool integer) {
    if (lb > ub) throw std::invalid_argument("add_var: empty domain for " + name);
    vars.push_back({name, lb, ub, integer});
    return static_cast<int>(vars.size()) - 1;
}

double IntegerProgram::eval_objective(std::span<const long> assignment) const {
    double v = affine_value(objective, assignment);
    for (const auto& pw : piecewise) {
        const double e = affine_value(pw.expr, assignment);
        if (e < pw.threshold) v += e;
    }
    return v;
}

bool IntegerProgram::feasible(std::span<const long> assignment, double tol) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (assignment[i] < vars[i].lb || assignment[i] > vars[i].ub) return false;
    for (const auto& c : constraints) {
        const double v = affine_value(c.lhs, assignment);
        switch (c.rel) {
            case Rel::le:
                if (v > c.rhs + tol) return false;
                break;
            case Rel::ge:
                if (v < c.rhs - tol) return false;
                break;
            case Rel::eq:
                if (std::abs(v - c.rhs) > tol) return false;
                break;
        }
    }
    return true;
}

namespace {

struct Search {
    const IntegerProgram& ip;
    const int n;
    std::vector<long> lb, ub;
    std::vector<long> best;
    double best_obj = -std::numeric_limits<double>::infinity();
    bool has_best = false;
    bool aborted = false;
    long nodes = 0;
    long max_nodes;

    explicit Search(const IntegerProgram& p, double budget_ms)
        : ip(p), n(static_cast<int>(p.vars.size())), max_nodes(budget_nodes(budget_ms)) {
        lb.resize(n);
        ub.resize(n);
        for (int i = 0; i < n; ++i) {
            lb[i] = p.vars[i].lb;
            ub[i] = p.vars[i].ub;
        }
    }

    bool out_of_time() {
        if (++nodes > max_nodes) aborted = true;
        return aborted;
    }

    // domain tightening; returns false on proven infeasibility
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : ip.constraints) {
                auto [lo, hi] = affine_range(c.lhs, lb, ub);
                if (c.rel != Rel::ge && lo > c.rhs + kTol) return false;
                if (c.rel != Rel::le && hi < c.rhs - kTol) return false;

                for (const auto& term : c.lhs.terms) {
                    const int v = term.var;
                    const double cf = term.coeff;
                    if (cf == 0.0) continue;
                    const double cmin = cf >= 0 ? cf * lb[v] : cf * ub[v];
                    const double cmax = cf >= 0 ? cf * ub[v] : cf * lb[v];
                    if (c.rel != Rel::ge) {  // le or eq: c*x <= rhs - lo_others
                        const double slack = c.rhs - (lo - cmin);
                        if (cf > 0) {
                            const long nu = static_cast<long>(std::floor(slack / cf + kTol));
                            if (nu < ub[v]) { ub[v] = nu; changed = true; }
                        } else {
                            const long nl = static_cast<long>(std::ceil(slack / cf - kTol));
                            if (nl > lb[v]) { lb[v] = nl; changed = true; }
                        }
                    }
                    if (c.rel != Rel::le) {  // ge or eq: c*x >= rhs - hi_others
                        const double need = c.rhs - (hi - cmax);
                        if (cf > 0) {
                            const long nl = static_cast<long>(std::ceil(need / cf - kTol));
                            if (nl > lb[v]) { lb[v] = nl; changed = true; }
                        } else {
                            const long nu = static_cast<long>(std::floor(need / cf + kTol));
                            if (nu < ub[v]) { ub[v] = nu; changed = true; }
                        }
                    }
                    if (lb[v] > ub[v]) return false;
                }
            }
        }
        return true;
    }

    double upper_bound() const {
        auto [olo, ohi] = affine_range(ip.objective, lb, ub);
        double b = ohi;
        for (const auto& pw : ip.piecewise) {
            auto [lo, hi] = affine_range(pw.expr, lb, ub);
            b += piecewise_upper(lo, hi, pw.threshold);
        }
        return b;
    }

    void dfs() {
        if (aborted || out_of_time()) return;
        if (!propagate()) return;
        if (has_best && upper_bound() <= best_obj + kTol) return;

        int k = -1;
        for (int i = 0; i < n; ++i)
            if (lb[i] < ub[i]) {
                k = i;
                break;
            }
        if (k < 0) {
            std::vector<long> x(lb.begin(), lb.end());
            if (!ip.feasible(x)) return;
            const double obj = ip.eval_objective(x);
            if (!has_best || obj > best_obj + kTol) {
                has_best = true;
                best_obj = obj;
                best = std::move(x);
            }
            return;
        }

        const std::vector<long> save_lb = lb, save_ub = ub;
        for (long v = save_lb[k]; v <= save_ub[k]; ++v) {
            lb = save_lb;
            ub = save_ub;
            lb[k] = ub[k] = v;
            dfs();
            if (aborted) return;
        }
        lb = save_lb;
        ub = save_ub;
    }
};

}  // namespace

IPSolution solve_exact(const IntegerProgram& ip, double time_budget_ms) {
    for (const auto& v : ip.vars)
        if (!v.integer)
            throw std::invalid_argument("solve_exact: continuous variable " + v.name +
                                        " (lowered programs are export-only)");
    Search s(ip, time_budget_ms);
    s.dfs();

    IPSolution sol;
    if (s.has_best) {
        sol.assignment = s.best;
        sol.objective = s.best_obj;
        sol.status = s.aborted ? IPSolution::Status::budget_exceeded : IPSolution::Status::optimal;
    } else {
        sol.status = s.aborted ? IPSolution::Status::budget_exceeded : IPSolution::Status::infeasible;
    }
    return sol;
}

IntegerProgram lower_piecewise(const IntegerProgram& ip) {
    IntegerProgram out;
    out.vars = ip.vars;
    out.objective = ip.objective;
    out.constraints = ip.constraints;

    std::vector<long> lbs, ubs;
    for (const auto& v : ip.vars) {
        lbs.push_back(v.lb);
        ubs.push_back(v.ub);
    }

    for (size_t k = 0; k < ip.piecewise.size(); ++k) {
        const auto& pw = ip.piecewise[k];
        auto [lo, hi] = affine_range(pw.expr, lbs, ubs);
        const double big_m = std::max(std::abs(lo), std::abs(hi)) + std::abs(pw.threshold) + 1.0;
        const std::string tag = "pw" + std::to_string(k);

        const int z = out.add_var(tag + "_on", 0, 1, true);
        const long ylb = static_cast<long>(std::floor(std::min(lo, 0.0)));
        const long yub = static_cast<long>(std::ceil(std::max(hi, 0.0)));
        const int y = out.add_var(tag + "_val", ylb, yub, false);
        out.objective.add(y, 1.0);

        // z = 1 exactly when expr < threshold
        Affine a1 = pw.expr;  // expr + M z >= threshold
        a1.add(z, big_m);
        out.constraints.push_back({tag + "_off", a1, Rel::ge, pw.threshold});
        Affine a2 = pw.expr;  // expr + M z <= threshold - eps + M
        a2.add(z, big_m);
        out.constraints.push_back(
            {tag + "_on", a2, Rel::le, pw.threshold - kIndicatorEps + big_m});

        // y = z * expr
        Affine a3;  // y - M z <= 0
        a3.add(y, 1.0).add(z, -big_m);
        out.constraints.push_back({tag + "_cap", a3, Rel::le, 0.0});
        Affine a4;  // y + M z >= 0
        a4.add(y, 1.0).add(z, big_m);
        out.constraints.push_back({tag + "_floor", a4, Rel::ge, 0.0});
        Affine a5;  // y - expr + M z <= M
        a5.add(y, 1.0).add(z, big_m);
        for (const auto& term : pw.expr.terms) a5.add(term.var, -term.coeff);
        a5.constant = -pw.expr.constant;
        out.constraints.push_back({tag + "_tie_hi", a5, Rel::le, big_m});
        Affine a6;  // y - expr - M z >= -M
        a6.add(y, 1.0).add(z, -big_m);
        for (const auto& term : pw.expr.terms) a6.add(term.var, -term.coeff);
        a6.constant = -pw.expr.constant;
        out.constraints.push_back({tag + "_tie_lo", a6, Rel::ge, -big_m});
    }
    return out;
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string export_lp(const IntegerProgram& input) {
    const IntegerProgram ip = input.piecewise.empty() ? input : lower_piecewise(input);
    std::ostringstream out;
    out << "\\ relo lp export\n";
    out << "\\ constant " << num(ip.objective.constant) << "\n";

    auto write_expr = [&](const Affine& a) {
        if (a.terms.empty()) {
            out << " 0 " << (ip.vars.empty() ? "x" : ip.vars[0].name);
            return;
        }
        for (const auto& t : a.terms) {
            out << (t.coeff < 0 ? " - " : " + ") << num(std::abs(t.coeff)) << " "
                << ip.vars[t.var].name;
        }
    };

    out << "Maximize\n obj:";
    write_expr(ip.objective);
    out << "\nSubject To\n";
    for (const auto& c : ip.constraints) {
        out << " " << c.name << ":";
        write_expr(c.lhs);
        const char* rel = c.rel == Rel::le ? "<=" : (c.rel == Rel::ge ? ">=" : "=");
        out << " " << rel << " " << num(c.rhs - c.lhs.constant) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : ip.vars)
        out << " " << v.lb << " <= " << v.name << " <= " << v.ub << "\n";
    bool any_int = false;
    for (const auto& v : ip.vars) any_int |= v.integer;
    if (any_int) {
        out << "Generals\n";
        for (const auto& v : ip.vars)
            if (v.integer) out << " " << v.name << "\n";
    }
    out << "End\n";
    return out.str();
}

namespace {

struct Token {
    std::string text;
};

std::vector<std::string> tokenize_lp(const std::string& text, double* constant_out) {
    std::vector<std::string> toks;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '\\') {
            std::istringstream cl(line.substr(1));
            std::string word;
            cl >> word;
            if (word == "constant" && constant_out) cl >> *constant_out;
            continue;
        }
        std::string cur;
        for (char ch : line) {
            if ((ch == '+' || ch == '-') && !cur.empty() &&
                (cur.back() == 'e' || cur.back() == 'E') &&
                (std::isdigit(static_cast<unsigned char>(cur[0])) || cur[0] == '.')) {
                cur.push_back(ch);  // exponent sign inside a numeric literal
                continue;
            }
            if (ch == ':' || ch == '+' || ch == '-' || ch == '<' || ch == '>' || ch == '=' ||
                std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty()) {
                    toks.push_back(cur);
                    cur.clear();
                }
                if (ch == ':' || ch == '+' || ch == '-') toks.push_back(std::string(1, ch));
                if (ch == '<' || ch == '>' || ch == '=') {
                    if (!toks.empty() && (toks.back() == "<" || toks.back() == ">") && ch == '=') {
                        toks.back() += '=';
                    } else {
                        toks.push_back(std::string(1, ch));
                    }
                }
            } else {
                cur.push_back(ch);
            }
        }
        if (!cur.empty()) toks.push_back(cur);
    }
    return toks;
}

bool is_number(const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0';
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

IntegerProgram parse_lp(const std::string& text) {
    double obj_constant = 0.0;
    const auto toks = tokenize_lp(text, &obj_constant);
    IntegerProgram ip;
    ip.objective.constant = obj_constant;

    std::map<std::string, int> var_ids;
    auto var_of = [&](const std::string& name) {
        auto it = var_ids.find(name);
        if (it != var_ids.end()) return it->second;
        const int id = ip.add_var(name, 0, std::numeric_limits<long>::max() / 4, false);
        var_ids[name] = id;
        return id;
    };

    enum class Section { none, objective, constraints, bounds, generals };
    Section sec = Section::none;

    size_t k = 0;
    auto peek_keyword = [&](size_t at) -> Section {
        if (at >= toks.size()) return Section::none;
        const std::string w = lower(toks[at]);
        if (w == "maximize" || w == "max") return Section::objective;
        if (w == "subject") return Section::constraints;
        if (w == "st" || w == "s.t.") return Section::constraints;
        if (w == "bounds") return Section::bounds;
        if (w == "generals" || w == "general" || w == "gen") return Section::generals;
        return Section::none;
    };

    // expression parser: [label :] {sign num? name}* [rel rhs]
    auto parse_expr = [&](size_t& i, Affine& a, Rel* rel, double* rhs) {
        double sign = 1.0;
        while (i < toks.size()) {
            const std::string& t = toks[i];
            if (t == "+") { sign = 1.0; ++i; continue; }
            if (t == "-") { sign = -1.0; ++i; continue; }
            if (t == "<=" || t == ">=" || t == "=") {
                if (!rel) throw std::runtime_error("parse_lp: unexpected relation");
                *rel = t == "<=" ? Rel::le : (t == ">=" ? Rel::ge : Rel::eq);
                ++i;
                double rsign = 1.0;
                while (i < toks.size() && (toks[i] == "-" || toks[i] == "+")) {
                    if (toks[i] == "-") rsign = -rsign;
                    ++i;
                }
                *rhs = rsign * std::stod(toks[i]);
                ++i;
                return true;
            }
            if (peek_keyword(i) != Section::none || lower(t) == "end") return false;
            if (is_number(t)) {
                const double c = std::stod(t) * sign;
                ++i;
                if (i < toks.size() && !is_number(toks[i]) && toks[i] != "+" && toks[i] != "-" &&
                    peek_keyword(i) == Section::none && lower(toks[i]) != "end" &&
                    toks[i] != "<=" && toks[i] != ">=" && toks[i] != "=") {
                    if (c != 0.0) a.add(var_of(toks[i]), c);
                    else var_of(toks[i]);
                    ++i;
                } else {
                    a.constant += c;
                }
                sign = 1.0;
                continue;
            }
            a.add(var_of(t), sign);
            sign = 1.0;
            ++i;
        }
        return false;
    };

    while (k < toks.size()) {
        const Section next = peek_keyword(k);
        if (next == Section::constraints) {
            k += lower(toks[k]) == "subject" ? 2 : 1;  // skip "subject to"
            sec = Section::constraints;
            continue;
        }
        if (next != Section::none) {
            sec = next;
            ++k;
            continue;
        }
        if (lower(toks[k]) == "end") break;

        switch (sec) {
            case Section::objective: {
                std::string label;
                if (k + 1 < toks.size() && toks[k + 1] == ":") {
                    label = toks[k];
                    k += 2;
                }
                parse_expr(k, ip.objective, nullptr, nullptr);
                break;
            }
            case Section::constraints: {
                Constraint c;
                if (k + 1 < toks.size() && toks[k + 1] == ":") {
                    c.name = toks[k];
                    k += 2;
                }
                if (!parse_expr(k, c.lhs, &c.rel, &c.rhs))
                    throw std::runtime_error("parse_lp: constraint without relation");
                ip.constraints.push_back(std::move(c));
                break;
            }
            case Section::bounds: {
                // form: lb <= name <= ub, with optional sign tokens
                auto read_signed = [&]() {
                    double sign = 1.0;
                    while (k < toks.size() && (toks[k] == "-" || toks[k] == "+")) {
                        if (toks[k] == "-") sign = -sign;
                        ++k;
                    }
                    const double v = std::stod(toks[k]);
                    ++k;
                    return sign * v;
                };
                const double lb = read_signed();
                if (toks[k] != "<=") throw std::runtime_error("parse_lp: bad bounds line");
                ++k;
                const int v = var_of(toks[k]);
                ++k;
                if (toks[k] != "<=") throw std::runtime_error("parse_lp: bad bounds line");
                ++k;
                const double ub = read_signed();
                ip.vars[v].lb = static_cast<long>(std::llround(lb));
                ip.vars[v].ub = static_cast<long>(std::llround(ub));
                break;
            }
            case Section::generals: {
                ip.vars[var_of(toks[k])].integer = true;
                ++k;
                break;
            }
            default:
                throw std::runtime_error("parse_lp: token outside any section: " + toks[k]);
        }
    }
    return ip;
}

namespace {

std::map<std::string, double> term_map(const IntegerProgram& p, const Affine& a) {
    std::map<std::string, double> m;
    for (const auto& t : a.terms) m[p.vars[t.var].name] += t.coeff;
    std::erase_if(m, [](const auto& kv) { return kv.second == 0.0; });
    return m;
}

bool affine_equal(const IntegerProgram& pa, const Affine& a, const IntegerProgram& pb,
                  const Affine& b, double tol) {
    const auto ma = term_map(pa, a);
    const auto mb = term_map(pb, b);
    if (ma.size() != mb.size()) return false;
    for (const auto& [k, v] : ma) {
        const auto it = mb.find(k);
        if (it == mb.end() || std::abs(it->second - v) > tol) return false;
    }
    return std::abs(a.constant - b.constant) <= tol;
}

}  // namespace

bool structurally_equal(const IntegerProgram& a, const IntegerProgram& b, double tol) {
    if (a.vars.size() != b.vars.size()) return false;
    std::map<std::string, const Var*> bv;
    for (const auto& v : b.vars) bv[v.name] = &v;
    for (const auto& v : a.vars) {
        const auto it = bv.find(v.name);
        if (it == bv.end()) return false;
        if (v.lb != it->second->lb || v.ub != it->second->ub || v.integer != it->second->integer)
            return false;
    }
    if (!affine_equal(a, a.objective, b, b.objective, tol)) return false;
    if (a.piecewise.size() != b.piecewise.size()) return false;
    for (size_t i = 0; i < a.piecewise.size(); ++i) {
        if (std::abs(a.piecewise[i].threshold - b.piecewise[i].threshold) > tol) return false;
        if (!affine_equal(a, a.piecewise[i].expr, b, b.piecewise[i].expr, tol)) return false;
    }
    if (a.constraints.size() != b.constraints.size()) return false;
    for (size_t i = 0; i < a.constraints.size(); ++i) {
        const auto& ca = a.constraints[i];
        const auto& cb = b.constraints[i];
        if (ca.rel != cb.rel) return false;
        // compare with constants folded into the rhs
        if (std::abs((ca.rhs - ca.lhs.constant) - (cb.rhs - cb.lhs.constant)) > tol) return false;
        Affine la = ca.lhs, lb_ = cb.lhs;
        la.constant = 0;
        lb_.constant = 0;
        if (!affine_equal(a, la, b, lb_, tol)) return false;
    }
    return true;
}

IntegerProgram build_relocation_ip(const std::vector<double>& U, const demand::TravelTimeTensor& T,
                                   const sim::SimState& st, const policy::RelocParams& p, int t) {
    const int N = st.zones();
    IntegerProgram ip;
    std::vector<std::pair<int, int>> arc_of_var;

    for (int i = 0; i < N; ++i) {
        const long cap = std::min(st.x_v[i], st.x_s[i]);
        if (cap <= 0) continue;
        Constraint row;
        row.name = "cap_" + std::to_string(i);
        row.rel = Rel::le;
        row.rhs = static_cast<double>(cap);
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            const int v =
                ip.add_var("u_r_" + std::to_string(i) + "_" + std::to_string(j), 0, cap, true);
            arc_of_var.push_back({i, j});
            ip.objective.add(v, -p.w_tt * T.at(i, j, t));
            row.lhs.add(v, 1.0);
        }
        ip.constraints.push_back(std::move(row));
    }

    for (int k = 0; k < N; ++k) {
        PiecewiseTerm pw;
        pw.threshold = p.r_th;
        pw.expr.constant = U[k];
        for (size_t v = 0; v < arc_of_var.size(); ++v) {
            const auto [i, j] = arc_of_var[v];
            if (i == k) pw.expr.add(static_cast<int>(v), -1.0);
            if (j == k) pw.expr.add(static_cast<int>(v), 1.0);
        }
        ip.piecewise.push_back(std::move(pw));
    }
    return ip;
}

IntegerProgram build_transit_ip(const std::vector<double>& U, const demand::TravelTimeTensor& T,
                                const sim::SimState& st, const policy::RelocParams& p, int t) {
    const int N = st.zones();
    IntegerProgram ip;
    for (int i = 0; i < N; ++i) {
        const long idle = st.x_s[i];
        if (idle <= 0) continue;
        Constraint row;
        row.name = "staff_" + std::to_string(i);
        row.rel = Rel::le;
        row.rhs = static_cast<double>(idle);
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            const int v =
                ip.add_var("u_t_" + std::to_string(i) + "_" + std::to_string(j), 0, idle, true);
            ip.objective.add(v, U[j] - p.w_tt * p.scooter_factor * T.at(i, j, t));
            row.lhs.add(v, 1.0);
        }
        ip.constraints.push_back(std::move(row));
    }
    return ip;
}

IntegerProgram build_full_model(const demand::Scenario& sc, const demand::TravelTimeTensor& T,
                                int H, long fleet, long staff) {
    const int N = sc.zones;
    IntegerProgram ip;

    const long reloc_ub = std::min(fleet, staff);
    // decision variables first so state variables resolve by propagation
    auto vid = [](const char* kind, int i, int j, int t) {
        return std::string(kind) + "_" + std::to_string(i) + "_" + std::to_string(j) + "_" +
               std::to_string(t);
    };
    std::map<std::array<int, 3>, int> uv, ur, ut;
    for (int t = 1; t <= H; ++t)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const long d = sc.d(i, j, t);
                if (d > 0) {
                    const int v = ip.add_var(vid("u_v", i, j, t), 0, d, true);
                    uv[{i, j, t}] = v;
                    ip.objective.add(v, demand::effective_travel_time(T, i, j, t, H) / 60.0);
                }
                if (i != j && reloc_ub > 0) ur[{i, j, t}] = ip.add_var(vid("u_r", i, j, t), 0, reloc_ub, true);
                if (i != j && staff > 0) ut[{i, j, t}] = ip.add_var(vid("u_t", i, j, t), 0, staff, true);
            }

    std::map<std::array<int, 2>, int> xv, xs;
    for (int t = 1; t <= H; ++t)
        for (int i = 0; i < N; ++i) {
            xv[{i, t}] = ip.add_var("x_v_" + std::to_string(i) + "_" + std::to_string(t), 0, fleet, true);
            if (staff > 0)
                xs[{i, t}] = ip.add_var("x_s_" + std::to_string(i) + "_" + std::to_string(t), 0, staff, true);
        }

    auto lookup = [](const std::map<std::array<int, 3>, int>& m, int i, int j,
                     int t) -> const int* {
        const auto it = m.find({i, j, t});
        return it == m.end() ? nullptr : &it->second;
    };

    for (int i = 0; i < N; ++i) {
        Constraint c0;
        c0.name = "xv0_" + std::to_string(i);
        c0.rel = Rel::eq;
        c0.rhs = static_cast<double>(sc.vehicles0[i]);
        c0.lhs.add(xv[{i, 1}], 1.0);
        ip.constraints.push_back(std::move(c0));
        if (staff > 0) {
            Constraint s0;
            s0.name = "xs0_" + std::to_string(i);
            s0.rel = Rel::eq;
            s0.rhs = static_cast<double>(sc.staff0[i]);
            s0.lhs.add(xs[{i, 1}], 1.0);
            ip.constraints.push_back(std::move(s0));
        }
    }

    for (int t = 1; t <= H; ++t)
        for (int i = 0; i < N; ++i) {
            // capacity at t
            Constraint cap;
            cap.name = "vcap_" + std::to_string(i) + "_" + std::to_string(t);
            cap.rel = Rel::le;
            cap.rhs = 0.0;
            for (int j = 0; j < N; ++j) {
                if (const int* v = lookup(uv, i, j, t)) cap.lhs.add(*v, 1.0);
                if (const int* v = lookup(ur, i, j, t)) cap.lhs.add(*v, 1.0);
            }
            cap.lhs.add(xv[{i, t}], -1.0);
            if (!cap.lhs.terms.empty()) ip.constraints.push_back(std::move(cap));

            if (staff > 0) {
                Constraint scap;
                scap.name = "scap_" + std::to_string(i) + "_" + std::to_string(t);
                scap.rel = Rel::le;
                scap.rhs = 0.0;
                for (int j = 0; j < N; ++j) {
                    if (const int* v = lookup(ur, i, j, t)) scap.lhs.add(*v, 1.0);
                    if (const int* v = lookup(ut, i, j, t)) scap.lhs.add(*v, 1.0);
                }
                scap.lhs.add(xs[{i, t}], -1.0);
                ip.constraints.push_back(std::move(scap));
            }

            // flow into t+1
            if (t == H) continue;
            Constraint flow;
            flow.name = "vflow_" + std::to_string(i) + "_" + std::to_string(t + 1);
            flow.rel = Rel::eq;
            flow.rhs = 0.0;
            flow.lhs.add(xv[{i, t + 1}], 1.0);
            flow.lhs.add(xv[{i, t}], -1.0);
            for (int j = 0; j < N; ++j) {
                if (const int* v = lookup(uv, i, j, t)) flow.lhs.add(*v, 1.0);
                if (const int* v = lookup(ur, i, j, t)) flow.lhs.add(*v, 1.0);
            }
            for (int j = 0; j < N; ++j)
                for (int tp = 1; tp <= t; ++tp) {
                    if (tp + demand::duration_slots(T.at(j, i, tp)) != t + 1) continue;
                    if (const int* v = lookup(uv, j, i, tp)) flow.lhs.add(*v, -1.0);
                    if (const int* v = lookup(ur, j, i, tp)) flow.lhs.add(*v, -1.0);
                }
            ip.constraints.push_back(std::move(flow));

            if (staff > 0) {
                Constraint sflow;
                sflow.name = "sflow_" + std::to_string(i) + "_" + std::to_string(t + 1);
                sflow.rel = Rel::eq;
                sflow.rhs = 0.0;
                sflow.lhs.add(xs[{i, t + 1}], 1.0);
                sflow.lhs.add(xs[{i, t}], -1.0);
                for (int j = 0; j < N; ++j) {
                    if (const int* v = lookup(ur, i, j, t)) sflow.lhs.add(*v, 1.0);
                    if (const int* v = lookup(ut, i, j, t)) sflow.lhs.add(*v, 1.0);
                }
                for (int j = 0; j < N; ++j)
                    for (int tp = 1; tp <= t; ++tp) {
                        if (tp + demand::duration_slots(T.at(j, i, tp)) != t + 1) continue;
                        if (const int* v = lookup(ur, j, i, tp)) sflow.lhs.add(*v, -1.0);
                        if (const int* v = lookup(ut, j, i, tp)) sflow.lhs.add(*v, -1.0);
                    }
                ip.constraints.push_back(std::move(sflow));
            }
        }
    return ip;
}

// --- specialized relocation-stage search ---

namespace {

struct UnitArc {
    int from;
    int to;
    double cost;
    double init_delta;
    double optimistic;
};

double gated(double u, double r_th) { return u < r_th ? u : 0.0; }

}  // namespace

LocalSolveResult solve_local_relocation(const std::vector<double>& U,
                                        const demand::TravelTimeTensor& T,
                                        const std::vector<long>& caps,
                                        const policy::RelocParams& p, int t,
                                        double time_budget_ms) {
    const int N = static_cast<int>(U.size());
    long units_total = 0;
    for (long c : caps) units_total += c;

    double base = 0.0;
    for (double u : U) base += gated(u, p.r_th);

    LocalSolveResult res;
    res.objective = base;
    if (units_total == 0) return res;

    // state-independent single-unit gain bounds over every reachable net
    std::vector<double> maxup(N, 0.0), maxdown(N, 0.0);
    for (int k = 0; k < N; ++k) {
        double up = -std::numeric_limits<double>::infinity();
        for (long n = -caps[k]; n < units_total; ++n)
            up = std::max(up, gated(U[k] + n + 1, p.r_th) - gated(U[k] + n, p.r_th));
        maxup[k] = up;
        if (caps[k] > 0) {
            double down = -std::numeric_limits<double>::infinity();
            for (long n = -caps[k] + 1; n <= units_total; ++n)
                down = std::max(down, gated(U[k] + n - 1, p.r_th) - gated(U[k] + n, p.r_th));
            maxdown[k] = down;
        }
    }

    std::vector<UnitArc> arcs;
    for (int i = 0; i < N; ++i) {
        if (caps[i] <= 0) continue;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            UnitArc a;
            a.from = i;
            a.to = j;
            a.cost = p.w_tt * T.at(i, j, t);
            a.optimistic = maxup[j] + maxdown[i] - a.cost;
            if (a.optimistic <= kTol) continue;  // a unit here can never strictly help
            a.init_delta = gated(U[j] + 1, p.r_th) - gated(U[j], p.r_th) +
                           gated(U[i] - 1, p.r_th) - gated(U[i], p.r_th) - a.cost;
            arcs.push_back(a);
        }
    }
    if (arcs.empty()) return res;

    std::sort(arcs.begin(), arcs.end(), [](const UnitArc& a, const UnitArc& b) {
        if (a.init_delta != b.init_delta) return a.init_delta > b.init_delta;
        if (a.from != b.from) return a.from < b.from;
        return a.to < b.to;
    });
    const int A = static_cast<int>(arcs.size());
    std::vector<double> suffix_opt(A + 1, -std::numeric_limits<double>::infinity());
    for (int a = A - 1; a >= 0; --a) suffix_opt[a] = std::max(suffix_opt[a + 1], arcs[a].optimistic);

    std::vector<long> rem = caps;
    std::vector<long> net(N, 0);
    std::vector<long> counts(A, 0), best_counts(A, 0);
    double cur = base, best = base;
    long rem_units = units_total;
    long nodes = 0;
    bool aborted = false;
    const long max_nodes = budget_nodes(time_budget_ms);

    const std::function<void(int)> dfs = [&](int start) {
        if (aborted) return;
        if (++nodes > max_nodes) {
            aborted = true;
            return;
        }
        if (cur > best + kTol) {
            best = cur;
            best_counts = counts;
        }
        for (int a = start; a < A; ++a) {
            if (rem_units == 0) return;
            if (cur + rem_units * suffix_opt[a] <= best + kTol) return;  // suffix max is sorted-safe
            const UnitArc& arc = arcs[a];
            if (rem[arc.from] == 0) continue;
            const double delta = gated(U[arc.to] + net[arc.to] + 1, p.r_th) -
                                 gated(U[arc.to] + net[arc.to], p.r_th) +
                                 gated(U[arc.from] + net[arc.from] - 1, p.r_th) -
                                 gated(U[arc.from] + net[arc.from], p.r_th) - arc.cost;
            rem[arc.from]--;
            net[arc.to]++;
            net[arc.from]--;
            counts[a]++;
            cur += delta;
            rem_units--;
            dfs(a);
            rem[arc.from]++;
            net[arc.to]--;
            net[arc.from]++;
            counts[a]--;
            cur -= delta;
            rem_units++;
            if (aborted) return;
        }
    };
    dfs(0);

    res.objective = best;
    res.proven = !aborted;
    std::map<std::pair<int, int>, long> merged;
    for (int a = 0; a < A; ++a)
        if (best_counts[a] > 0) merged[{arcs[a].from, arcs[a].to}] += best_counts[a];
    for (const auto& [arc, count] : merged) res.moves.push_back({arc.first, arc.second, count});
    return res;
}

LocalMipPolicy::LocalMipPolicy(policy::RelocParams params, policy::PredictorSet predictors,
                               double solve_budget_ms)
    : params_(params), pred_(std::move(predictors)), solve_budget_ms_(solve_budget_ms) {
    if (!pred_.availability || !pred_.demand_density)
        throw std::invalid_argument("local-mip policy: predictors required");
}

void LocalMipPolicy::begin_scenario(const sim::SimInputs& in, const demand::Scenario& sc) {
    travel_ = in.travel;
    budget_exceeded_ = false;
    x_obs_.assign(sc.zones, 0.0);
}

void LocalMipPolicy::decide(sim::SimState& state, sim::DecisionLog& log, int t) {
    const int N = state.zones();
    const demand::TravelTimeTensor& T = *travel_;
    for (int i = 0; i < N; ++i) x_obs_[i] = static_cast<double>(state.x_v[i]);
    pred_.availability->observe(x_obs_);
    const auto x_hat = pred_.availability->predict();
    const auto p_hat = pred_.demand_density->predict(t + params_.h);
    std::vector<double> U = policy::imbalance(x_hat, p_hat, params_.w_d);

    std::vector<long> caps(N, 0);
    for (int i = 0; i < N; ++i) caps[i] = std::min(state.x_v[i], state.x_s[i]);
    const LocalSolveResult rel = solve_local_relocation(U, T, caps, params_, t, solve_budget_ms_);
    budget_exceeded_ |= !rel.proven;

    for (const auto& mv : rel.moves) {
        log.relocations[{mv.from, mv.to, t}] += mv.count;
        const int arrive = t + demand::duration_slots(T.at(mv.from, mv.to, t));
        state.schedule_vehicles(arrive, mv.to, mv.count);
        state.schedule_staff(arrive, mv.to, false, mv.count);
        state.x_v[mv.from] -= mv.count;
        state.x_s[mv.from] -= mv.count;
        U[mv.to] += mv.count;    // carry the post-relocation imbalance into transits
        U[mv.from] -= mv.count;
    }

    // transit stage: the objective is linear with independent row caps, so
    // each row's optimum puts everything on its best positive arc
    for (int i = 0; i < N; ++i) {
        const long idle = state.x_s[i];
        if (idle <= 0) continue;
        int dest = -1;
        double best = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            const double coeff = U[j] - params_.w_tt * params_.scooter_factor * T.at(i, j, t);
            if (coeff > best + kTol) {
                best = coeff;
                dest = j;
            }
        }
        if (dest < 0) continue;
        log.transits[{i, dest, t}] += idle;
        const int arrive =
            t + demand::duration_slots(params_.scooter_factor * T.at(i, dest, t));
        state.schedule_staff(arrive, dest, true, idle);
        state.x_s[i] = 0;
    }
}

}  // namespace relo::mip
