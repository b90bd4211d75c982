#pragma once

// JSON (de)serialization for every artifact the CLI reads or writes:
// certificates, probe reports, kernels, and sampler reports.  Rationals are
// strings "a/b" so nothing is ever rounded; graphs travel as graph6 strings.

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stepcert/certifier.hpp"
#include "stepcert/sampler.hpp"

namespace nlohmann {

// Rational is a typedef of mpq_class, so it needs an adl_serializer
// specialization rather than in-namespace hooks.
template <>
struct adl_serializer<mpq_class> {
    static void to_json(json& j, const mpq_class& q) { j = stepcert::rat_str(q); }
    static void from_json(const json& j, mpq_class& q) {
        q = stepcert::parse_rational(j.get<std::string>());
    }
};

} // namespace nlohmann

namespace stepcert {

inline void to_json(nlohmann::json& j, const QuadValue& v) {
    j = nlohmann::json{{"radicands", v.radicands()}, {"coords", v.coords()}};
}

inline void from_json(const nlohmann::json& j, QuadValue& v) {
    v = QuadValue::make(j.at("radicands").get<std::vector<long>>(),
                        j.at("coords").get<std::vector<Rational>>());
}

inline void to_json(nlohmann::json& j, const Graph& g) { j = to_graph6(g); }

inline void from_json(const nlohmann::json& j, Graph& g) {
    g = parse_graph6(j.get<std::string>());
}

inline void to_json(nlohmann::json& j, const CanonGraph& h) { j = to_graph6(h.to_graph()); }

inline void from_json(const nlohmann::json& j, CanonGraph& h) {
    h = canonical_form(parse_graph6(j.get<std::string>()));
}

inline void to_json(nlohmann::json& j, const StepKernel& k) {
    j = nlohmann::json{{"widths", k.widths}, {"values", k.values}};
}

inline void from_json(const nlohmann::json& j, StepKernel& k) {
    k = make_step_kernel(j.at("widths").get<std::vector<Rational>>(),
                         j.at("values").get<std::vector<std::vector<Rational>>>());
}

inline void to_json(nlohmann::json& j, const PolyP& p) { j = p.coeffs; }

inline void from_json(const nlohmann::json& j, PolyP& p) {
    p = PolyP(j.get<std::vector<Rational>>());
}

inline void to_json(nlohmann::json& j, const KernelHandle& h) {
    j = nlohmann::json{{"kind", h.kind}};
    if (h.kind == "fp") {
        j["z"] = h.z;
        j["p"] = h.p;
        j["k"] = h.k;
        j["s"] = h.s;
    } else if (h.kind == "f2") {
        j["k"] = h.k;
        j["q"] = h.q;
    } else if (h.kind == "const") {
        j["alpha"] = h.alpha;
    } else {
        fail("UnknownKernelKind", "no kernel family named '" + h.kind + "'");
    }
}

inline void from_json(const nlohmann::json& j, KernelHandle& h) {
    h = KernelHandle{};
    h.kind = j.at("kind").get<std::string>();
    if (h.kind == "fp") {
        h.z = j.at("z").get<long>();
        h.p = j.at("p").get<long>();
        h.k = j.at("k").get<long>();
        h.s = j.at("s").get<long>();
    } else if (h.kind == "f2") {
        h.k = j.at("k").get<long>();
        h.q = j.at("q").get<std::vector<int>>();
    } else if (h.kind == "const") {
        h.alpha = j.at("alpha").get<Rational>();
    } else {
        fail("UnknownKernelKind", "no kernel family named '" + h.kind + "'");
    }
}

inline void to_json(nlohmann::json& j, const SupportEntry& e) {
    j = nlohmann::json{{"h", e.h},     {"p_coeff", e.p_coeff}, {"t_b", e.t_b},
                       {"t_u", e.t_u}, {"t_w", e.t_w},         {"contribution", e.contribution}};
}

inline void from_json(const nlohmann::json& j, SupportEntry& e) {
    j.at("h").get_to(e.h);
    j.at("p_coeff").get_to(e.p_coeff);
    j.at("t_b").get_to(e.t_b);
    j.at("t_u").get_to(e.t_u);
    j.at("t_w").get_to(e.t_w);
    j.at("contribution").get_to(e.contribution);
}

inline void to_json(nlohmann::json& j, const Certificate& c) {
    j = nlohmann::json{{"f", c.f},
                       {"p", c.p},
                       {"delta", c.delta},
                       {"lambda", c.lambda},
                       {"gamma", c.gamma},
                       {"m", c.m},
                       {"handle_u", c.handle_u},
                       {"z", c.z},
                       {"n", c.n},
                       {"w_choice", c.w_choice},
                       {"handle_w", c.handle_w},
                       {"support", c.support},
                       {"gap", c.gap}};
}

inline void from_json(const nlohmann::json& j, Certificate& c) {
    j.at("f").get_to(c.f);
    j.at("p").get_to(c.p);
    j.at("delta").get_to(c.delta);
    j.at("lambda").get_to(c.lambda);
    j.at("gamma").get_to(c.gamma);
    j.at("m").get_to(c.m);
    j.at("handle_u").get_to(c.handle_u);
    j.at("z").get_to(c.z);
    j.at("n").get_to(c.n);
    j.at("w_choice").get_to(c.w_choice);
    j.at("support").get_to(c.support);
    j.at("gap").get_to(c.gap);
    j.at("handle_w").get_to(c.handle_w);
}

inline void to_json(nlohmann::json& j, const LinearCertificate& c) {
    j = nlohmann::json{{"f", c.f},           {"p", c.p},     {"eps", c.eps},
                       {"sigma", c.sigma},   {"kernel", c.kernel}, {"gap", c.gap},
                       {"eps_poly", c.eps_poly}};
}

inline void from_json(const nlohmann::json& j, LinearCertificate& c) {
    j.at("f").get_to(c.f);
    j.at("p").get_to(c.p);
    j.at("eps").get_to(c.eps);
    j.at("sigma").get_to(c.sigma);
    j.at("kernel").get_to(c.kernel);
    j.at("gap").get_to(c.gap);
    j.at("eps_poly").get_to(c.eps_poly);
}

inline void to_json(nlohmann::json& j, const SampleReport& r) {
    j = nlohmann::json{{"n", r.n},
                       {"reps", r.reps},
                       {"seed", r.seed},
                       {"estimate", r.estimate},
                       {"stderr", r.std_error},
                       {"exact_target", r.exact_target},
                       {"z_score", r.z_score},
                       {"below_resolution", r.below_resolution},
                       {"note", r.note}};
}

inline void from_json(const nlohmann::json& j, SampleReport& r) {
    j.at("n").get_to(r.n);
    j.at("reps").get_to(r.reps);
    j.at("seed").get_to(r.seed);
    j.at("estimate").get_to(r.estimate);
    j.at("stderr").get_to(r.std_error);
    j.at("exact_target").get_to(r.exact_target);
    j.at("z_score").get_to(r.z_score);
    j.at("below_resolution").get_to(r.below_resolution);
    j.at("note").get_to(r.note);
}

// File helpers.  Any nlohmann parse or shape error is rewrapped as a library
// Error so callers see one exception family.

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("FileError", "cannot open '" + path + "' for reading");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail("MalformedJson", std::string("while parsing '" + path + "': ") + e.what());
    }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) fail("FileError", "cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) fail("FileError", "short write to '" + path + "'");
}

template <typename T>
T from_json_checked(const nlohmann::json& j, const char* what) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        fail("MalformedJson", std::string("bad ") + what + ": " + e.what());
    }
}

} // namespace stepcert
