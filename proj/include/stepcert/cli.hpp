#pragma once

// Command-line front end.  Six subcommands cover the whole pipeline: expand
// (coefficient tables), exceptional (where the cubic route degenerates),
// certify (linear or full certificates as JSON), validate (independent
// recheck of a certificate file), propkey (clique-domination kernels), and
// mc (randomized cross-checks of exact values).
//
// Exit codes: 0 success, 1 input or computation failure, 2 exceptional point
// (the linear route is refused and the caller should rerun with --delta),
// 64 malformed command line.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "stepcert/json_io.hpp"

namespace stepcert {
namespace detail {

// Accepts either a built-in graph name (K3, C5, path3+v, ...) or a graph6
// string, so scripted callers never need the name table.
inline Graph parse_graph_arg(const std::string& s) {
    try {
        return named_graph(s);
    } catch (const Error& e) {
        if (e.code() != "UnknownGraphName") throw;
    }
    try {
        return parse_graph6(s);
    } catch (const Error& e) {
        fail("BadGraphArgument",
             "'" + s + "' is neither a built-in graph name nor graph6 (" + e.what() + ")");
    }
}

// "-" or empty means stdout.
inline void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) fail("FileError", "cannot open '" + path + "' for writing");
    out << text;
    if (!out) fail("FileError", "short write to '" + path + "'");
}

inline std::string trim_ws(const std::string& s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// key=value lines, # comments.  Returned as --key=value tokens.
inline std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("FileError", "cannot open config '" + path + "' for reading");
    std::vector<std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim_ws(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        std::string key = eq == std::string::npos ? "" : trim_ws(line.substr(0, eq));
        if (key.empty())
            fail("MalformedConfig",
                 "expected key=value on line " + std::to_string(lineno) + " of '" + path + "'");
        out.push_back("--" + key + "=" + trim_ws(line.substr(eq + 1)));
    }
    return out;
}

// Splices config-file defaults into the argument list ahead of the user's own
// flags; with take-last options the explicit flags then win.  Keys for global
// options go before the subcommand, everything else right after it.
inline std::vector<std::string> apply_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return args;

    static const std::set<std::string> subcommands = {"expand", "exceptional", "certify",
                                                      "validate", "propkey",     "mc"};
    std::size_t subpos = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--threads" || a == "--config") {
            ++i;
            continue;
        }
        if (a.rfind("-", 0) == 0) continue;
        if (subcommands.count(a)) subpos = i;
        break;
    }

    std::vector<std::string> globals, locals;
    for (const std::string& tok : config_tokens(path)) {
        std::string key = tok.substr(2, tok.find('=') - 2);
        (key == "threads" ? globals : locals).push_back(tok);
    }

    std::vector<std::string> out(globals);
    if (subpos == args.size()) {
        out.insert(out.end(), args.begin(), args.end());
        out.insert(out.end(), locals.begin(), locals.end());
        return out;
    }
    out.insert(out.end(), args.begin(), args.begin() + subpos + 1);
    out.insert(out.end(), locals.begin(), locals.end());
    out.insert(out.end(), args.begin() + subpos + 1, args.end());
    return out;
}

inline Rational interior_p(const std::string& s) {
    Rational p = parse_rational(s);
    require(sign(p) > 0 && p < rat(1), "BoundaryP", "p must lie strictly inside (0,1)");
    return p;
}

} // namespace detail

inline int cli_main(int argc, char** argv) {
    CLI::App app{"exact density expansions and local-optimality certificates "
                 "for step-function kernels"};
    app.name("stepcert");
    app.require_subcommand(1);
    app.option_defaults()->take_last();

    int threads = 1;
    app.add_option("--threads", threads, "threads for expansion-table construction");
    std::string config_path;
    app.add_option("--config", config_path,
                   "file of key=value defaults; explicit flags override it");

    auto add_sub = [&](const char* cli_name, const char* what) {
        CLI::App* sub = app.add_subcommand(cli_name, what);
        sub->option_defaults()->take_last();
        sub->fallthrough(); // global --threads/--config may follow the subcommand
        return sub;
    };

    CLI::App* sc_expand = add_sub("expand", "print the full coefficient table at a rational p");
    std::string ex_graph, ex_p = "1/2", ex_csv, ex_out = "-";
    sc_expand->add_option("--graph", ex_graph, "graph name or graph6 string")->required();
    sc_expand->add_option("--p", ex_p, "base edge density a/b, strictly inside (0,1)");
    sc_expand->add_option("--csv", ex_csv, "also write the table to this CSV file");
    sc_expand->add_option("--out", ex_out, "output path, '-' for stdout");

    CLI::App* sc_exc = add_sub("exceptional",
                               "list the p in (0,1) where the cubic route degenerates");
    std::string xc_graph;
    sc_exc->add_option("--graph", xc_graph, "graph name or graph6 string")->required();

    CLI::App* sc_cert = add_sub("certify", "produce a non-maximality certificate as JSON");
    std::string ct_graph, ct_p, ct_delta, ct_out = "-";
    bool ct_linear = false;
    sc_cert->add_option("--graph", ct_graph, "graph name or graph6 string")->required();
    sc_cert->add_option("--p", ct_p, "base edge density a/b, strictly inside (0,1)")->required();
    sc_cert->add_option("--delta", ct_delta, "perturbation amplitude for the full pipeline");
    sc_cert->add_flag("--linear", ct_linear,
                      "force the single-direction route even when --delta is given");
    sc_cert->add_option("--out", ct_out, "certificate path, '-' for stdout");

    CLI::App* sc_val = add_sub("validate", "independently recheck a certificate file");
    std::string va_pos, va_opt;
    auto* va_grp = sc_val->add_option_group("certificate");
    va_grp->add_option("certificate", va_pos, "certificate JSON path");
    va_grp->add_option("--cert", va_opt, "certificate JSON path");
    va_grp->require_option(1);

    CLI::App* sc_key = add_sub("propkey",
                               "derive the clique-domination kernel for a clique order");
    long pk_z = 0;
    long pk_maxk = 0;
    sc_key->add_option("--z", pk_z, "clique order")->required();
    sc_key->add_option("--max-k", pk_maxk, "fail if the smallest admissible k exceeds this");

    CLI::App* sc_mc = add_sub("mc", "randomized sampling cross-check, reported as JSON");
    std::string mc_cert, mc_graph, mc_p = "1/2", mc_out = "-";
    long mc_n = 50, mc_reps = 10000;
    std::uint64_t mc_seed = 1;
    auto* mc_grp = sc_mc->add_option_group("target");
    mc_grp->add_option("--cert", mc_cert, "sample the perturbed kernel of this certificate");
    mc_grp->add_option("--graph", mc_graph, "sample a constant-p kernel for this graph");
    mc_grp->require_option(1);
    sc_mc->add_option("--p", mc_p, "density for --graph targets");
    sc_mc->add_option("--n", mc_n, "vertices per sampled graph");
    sc_mc->add_option("--reps", mc_reps, "independent samples");
    sc_mc->add_option("--seed", mc_seed, "RNG seed");
    sc_mc->add_option("--out", mc_out, "report path, '-' for stdout");

    std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
    try {
        args = detail::apply_config(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (sc_expand->parsed()) {
            Graph f = detail::parse_graph_arg(ex_graph);
            Rational p = detail::interior_p(ex_p);
            std::string csv = table_csv(build_table(f, threads), p);
            if (!ex_csv.empty()) detail::emit(ex_csv, csv);
            detail::emit(ex_out, csv);
            return 0;
        }
        if (sc_exc->parsed()) {
            Graph f = detail::parse_graph_arg(xc_graph);
            require(f.order >= 3 && f.order <= 7, "OrderOutOfRange",
                    "exceptional-point analysis supports 3 to 7 vertices");
            ExpansionTable table = build_table(f, threads);
            PolyP s = table.entries.at(canonical_form(named_graph("K3"))).s;
            if (s.is_zero()) {
                std::cout << "cubic direction polynomial is identically zero; "
                             "every p in (0,1) is exceptional\n";
                return 0;
            }
            auto roots = isolate_real_roots(s, rat(0), rat(1));
            if (roots.empty()) {
                std::cout << "no exceptional points in (0,1)\n";
                return 0;
            }
            for (const RootInterval& r : roots) {
                if (r.lo == r.hi)
                    std::cout << rat_str(r.lo) << "\n";
                else
                    std::cout << "(" << rat_str(r.lo) << ", " << rat_str(r.hi) << ")\n";
            }
            return 0;
        }
        if (sc_cert->parsed()) {
            Graph f = detail::parse_graph_arg(ct_graph);
            Rational p = detail::interior_p(ct_p);
            nlohmann::json j;
            if (ct_linear || ct_delta.empty()) {
                j = certify_linear(f, p);
                j["type"] = "linear";
            } else {
                j = certify_full(f, p, parse_rational(ct_delta));
                j["type"] = "full";
            }
            detail::emit(ct_out, j.dump(2) + "\n");
            if (!ct_out.empty() && ct_out != "-")
                std::cout << "certificate written to " << ct_out << "\n";
            return 0;
        }
        if (sc_val->parsed()) {
            std::string path = va_opt.empty() ? va_pos : va_opt;
            nlohmann::json j = read_json_file(path);
            std::string type =
                j.value("type", std::string(j.contains("support") ? "full" : "linear"));
            ValidationResult r;
            if (type == "full")
                r = validate_certificate(from_json_checked<Certificate>(j, "certificate"));
            else if (type == "linear")
                r = validate_linear_certificate(
                    from_json_checked<LinearCertificate>(j, "linear certificate"));
            else {
                std::cout << "invalid: unknown certificate type '" << type << "'\n";
                return 1;
            }
            if (!r.ok) {
                std::cout << "invalid: " << r.first_failure << "\n";
                return 1;
            }
            std::cout << "valid\n";
            return 0;
        }
        if (sc_key->parsed()) {
            KernelHandle u = make_uz(pk_z);
            std::vector<CanonGraph> support = domination_support(static_cast<int>(pk_z));
            Domination dom = find_domination_k(static_cast<int>(pk_z), support, u);
            if (pk_maxk > 0 && dom.k > pk_maxk)
                fail("SearchExhausted", "smallest admissible k is " + std::to_string(dom.k) +
                                            ", above --max-k " + std::to_string(pk_maxk));
            if (u.kind == "fp") u.k = dom.k;
            CanonGraph kz = canonical_form(complete_graph(static_cast<int>(pk_z)));
            QuadValue tkz = dom.t.at(kz);

            nlohmann::json j;
            j["z"] = pk_z;
            j["k"] = dom.k;
            j["kernel"] = u;
            j["clique_density"] = quad_str(tkz);
            nlohmann::json dens = nlohmann::json::object();
            for (const auto& [h, tv] : dom.t) dens[to_graph6(h.to_graph())] = quad_str(tv);
            j["densities"] = dens;
            if (u.kind == "fp") {
                Rational coeff = rat(-1) / rat_pow(rat(2), static_cast<unsigned long>(
                                                               pk_z * (pk_z - 1) / 2));
                QuadValue bound =
                    dom.k % 2 == 0
                        ? QuadValue(coeff *
                                    rat_pow(rat(1, u.p), static_cast<unsigned long>(dom.k / 2)))
                        : QuadValue::root_term(
                              coeff * rat_pow(rat(1, u.p),
                                              static_cast<unsigned long>((dom.k + 1) / 2)),
                              u.p);
                j["clique_bound"] = quad_str(bound);
                j["bound_holds"] = quad_sign(tkz - bound) <= 0;
            } else {
                j["clique_bound"] = "0";
                j["bound_holds"] = quad_sign(tkz) < 0;
            }
            require(j["bound_holds"].get<bool>(), "GapNotPositive",
                    "derived kernel violates its own clique bound");
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (sc_mc->parsed()) {
            SampleReport r;
            if (!mc_cert.empty()) {
                nlohmann::json j = read_json_file(mc_cert);
                std::string type =
                    j.value("type", std::string(j.contains("support") ? "full" : "linear"));
                if (type == "full") {
                    Certificate c = from_json_checked<Certificate>(j, "certificate");
                    r = mc_certificate_report(c, mc_n, mc_reps, mc_seed);
                } else {
                    LinearCertificate lc =
                        from_json_checked<LinearCertificate>(j, "linear certificate");
                    StepKernel perturbed =
                        add(constant(lc.p), scale(rat(lc.sigma) * lc.eps, lc.kernel));
                    r = estimate_induced(lc.f, perturbed, mc_n, mc_reps, mc_seed,
                                         QuadValue(rand_density(lc.f, lc.p) + lc.gap));
                }
            } else {
                Graph f = detail::parse_graph_arg(mc_graph);
                Rational p = detail::interior_p(mc_p);
                r = estimate_induced(f, constant(p), mc_n, mc_reps, mc_seed,
                                     QuadValue(rand_density(f, p)));
            }
            nlohmann::json j = r;
            detail::emit(mc_out, j.dump(2) + "\n");
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == "ExceptionalPoint" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}

} // namespace stepcert
