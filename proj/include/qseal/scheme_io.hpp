#pragma once

// JSON scheme files:
//
//   {
//     "M": 2, "dimA": 1, "dimB": 2, "promised_p": 0.75,
//     "states": [ [[re, im], ...], ... ],          // M vectors, basis order
//     "povm": [ {"label": [i, j], "matrix": [[re, im], ...]}, ... ]  // row-major
//   }
//
// Written numbers carry 17 significant digits.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qseal/errors.hpp"
#include "qseal/qstate.hpp"
#include "qseal/seal.hpp"

namespace qseal {

class SchemeParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Complex parse_complex(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemeParseError("expected a [re, im] pair, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Complex> parse_complex_list(const nlohmann::json& j, std::size_t expected, const std::string& what) {
    if (!j.is_array() || j.size() != expected)
        throw SchemeParseError(what + ": expected " + std::to_string(expected) + " [re, im] pairs");
    std::vector<Complex> out;
    out.reserve(expected);
    for (const auto& e : j) out.push_back(parse_complex(e));
    return out;
}

inline int positive_int(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1)
        throw SchemeParseError(std::string("missing or invalid positive integer '") + key + "'");
    return doc[key].get<int>();
}

inline std::string number_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%#.17g", v);
    return buf;
}

inline void write_complex_list(std::ostream& os, const Complex* data, Index n) {
    os << '[';
    for (Index k = 0; k < n; ++k) {
        if (k) os << ", ";
        os << '[' << number_text(data[k].real()) << ", " << number_text(data[k].imag()) << ']';
    }
    os << ']';
}

}  // namespace detail

// Throws SchemeParseError for malformed documents and ValidationError (or
// PromiseViolation) when the content does not form a valid scheme.
inline SealScheme parse_scheme(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemeParseError(std::string("scheme is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemeParseError("scheme document must be a JSON object");
    const int M = detail::positive_int(doc, "M");
    const int dimA = detail::positive_int(doc, "dimA");
    const int dimB = detail::positive_int(doc, "dimB");
    if (static_cast<long long>(dimA) * dimB > kMaxDenseDim) throw CapacityError("scheme: dimA * dimB too large");
    if (!doc.contains("promised_p") || !doc["promised_p"].is_number())
        throw SchemeParseError("missing or invalid 'promised_p'");
    const double promised_p = doc["promised_p"].get<double>();

    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].size() != static_cast<std::size_t>(M))
        throw SchemeParseError("'states' must be a list of M vectors");
    std::vector<PureState> states;
    const auto joint = static_cast<std::size_t>(dimA) * static_cast<std::size_t>(dimB);
    for (std::size_t m = 0; m < doc["states"].size(); ++m) {
        const auto amps = detail::parse_complex_list(doc["states"][m], joint, "states[" + std::to_string(m) + "]");
        ComplexVector v(static_cast<Index>(joint));
        for (std::size_t k = 0; k < joint; ++k) v(static_cast<Index>(k)) = amps[k];
        states.emplace_back(v, Bipartition{dimA, dimB});
    }

    if (!doc.contains("povm") || !doc["povm"].is_array() || doc["povm"].empty())
        throw SchemeParseError("'povm' must be a non-empty list");
    std::vector<PovmElement> elems;
    for (const auto& e : doc["povm"]) {
        if (!e.is_object() || !e.contains("label") || !e.contains("matrix"))
            throw SchemeParseError("each povm entry needs 'label' and 'matrix'");
        const auto& l = e["label"];
        if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() || !l[1].is_number_integer())
            throw SchemeParseError("povm label must be [i, j], got " + l.dump());
        const auto entries = detail::parse_complex_list(e["matrix"], static_cast<std::size_t>(dimB) * dimB, "povm matrix");
        ComplexMatrix op(dimB, dimB);
        for (int r = 0; r < dimB; ++r)
            for (int c = 0; c < dimB; ++c) op(r, c) = entries[static_cast<std::size_t>(r * dimB + c)];
        elems.push_back({OutcomeLabel::pair(l[0].get<int>(), l[1].get<int>()), std::move(op)});
    }
    return SealScheme(M, {dimA, dimB}, std::move(states), Povm(std::move(elems)), promised_p);
}

inline SealScheme read_scheme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemeParseError("cannot open scheme file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scheme(buf.str());
}

inline void write_scheme(std::ostream& os, const SealScheme& s) {
    os << "{\n  \"M\": " << s.message_count() << ",\n  \"dimA\": " << s.dims().dimA << ",\n  \"dimB\": "
       << s.dims().dimB << ",\n  \"promised_p\": " << detail::number_text(s.promised_p()) << ",\n  \"states\": [\n";
    for (std::size_t m = 0; m < s.states().size(); ++m) {
        const auto& v = s.states()[m].amplitudes();
        os << "    ";
        detail::write_complex_list(os, v.data(), v.size());
        os << (m + 1 < s.states().size() ? ",\n" : "\n");
    }
    os << "  ],\n  \"povm\": [\n";
    const auto& elems = s.bob_povm().elements();
    for (std::size_t k = 0; k < elems.size(); ++k) {
        // Eigen storage is column-major; the file is row-major.
        const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = elems[k].op;
        os << "    {\"label\": [" << elems[k].label.first() << ", " << elems[k].label.second() << "], \"matrix\": ";
        detail::write_complex_list(os, rm.data(), rm.size());
        os << (k + 1 < elems.size() ? "},\n" : "}\n");
    }
    os << "  ]\n}\n";
}

}  // namespace qseal
