#include "crossings/report.hpp"

#include <cmath>
#include <cstdio>

#include "crossings/transfer_function.hpp"

namespace crossings {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return format_double(v);
}

std::string json_string(const std::string& s) { return "\"" + json_escape(s) + "\""; }

const char* kind_name(CrossingKind k) {
    switch (k) {
        case CrossingKind::Regular: return "regular";
        case CrossingKind::CuspZero: return "cusp_zero";
        case CrossingKind::CuspInfinity: return "cusp_infinity";
    }
    return "regular";
}

const char* segment_name(SegmentKind k) {
    switch (k) {
        case SegmentKind::Axis: return "axis";
        case SegmentKind::Indent: return "indent";
        case SegmentKind::Arc: return "arc";
    }
    return "axis";
}

const char* verdict_kind_name(VerdictKind k) {
    switch (k) {
        case VerdictKind::Stable: return "stable";
        case VerdictKind::Unstable: return "unstable";
        case VerdictKind::Marginal: return "marginal";
    }
    return "marginal";
}

std::string crossing_json(const Crossing& c) {
    std::string out = "{\"t\":" + json_number(c.t);
    out += ",\"omega\":" + (c.omega ? json_number(*c.omega) : std::string("null"));
    out += ",\"location\":" + json_number(c.location);
    out += ",\"sign\":" + std::to_string(c.sign);
    out += ",\"kind\":" + json_string(kind_name(c.kind)) + "}";
    return out;
}

std::string crossing_array_json(const std::vector<Crossing>& cs) {
    std::string out = "[";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ",";
        out += crossing_json(cs[i]);
    }
    return out + "]";
}

std::string counts_json(const MethodCounts& n) {
    return "{\"nyquist\":" + std::to_string(n.nyquist) +
           ",\"nichols_single\":" + std::to_string(n.nichols_single) +
           ",\"nichols_multi\":" + std::to_string(n.nichols_multi) +
           ",\"winding\":" + std::to_string(n.winding) + "}";
}

std::string oracle_json(const OracleResult& o) {
    return "{\"closed_loop_rhp\":" + std::to_string(o.closed_loop_rhp) +
           ",\"routh_rhp\":" + std::to_string(o.routh_rhp) +
           ",\"indeterminate\":" + (o.indeterminate ? "true" : "false") +
           ",\"note\":" + json_string(o.note) + "}";
}

std::string crossing_text(const Crossing& c) {
    std::string out = "  t=" + format_double(c.t);
    out += " omega=" + (c.omega ? format_double(*c.omega) : std::string("-"));
    out += " location=" + format_double(c.location);
    out += " sign=" + std::string(c.sign > 0 ? "+1" : "-1");
    out += " kind=" + std::string(kind_name(c.kind));
    return out + "\n";
}

}  // namespace

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // collapse -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string verdict_to_string(const Verdict& v) {
    switch (v.kind) {
        case VerdictKind::Stable: return "stable";
        case VerdictKind::Unstable:
            return "unstable (" + std::to_string(v.n_z) + " closed-loop RHP pole" +
                   (v.n_z == 1 ? "" : "s") + ")";
        case VerdictKind::Marginal: return "marginal: " + v.reason;
    }
    return "marginal";
}

std::string to_json(const ReportDocument& doc) {
    const StabilityReport& r = doc.report;
    std::string out = "{";
    out += "\"schema_version\":" + json_string(doc.schema_version);
    out += ",\"input\":" + json_string(doc.tf_input);
    out += ",\"transfer_function\":" + json_string(doc.tf_text);
    out += ",\"gain\":" + json_number(doc.gain);
    out += ",\"config\":{\"big_radius\":" + json_number(doc.config.big_radius);
    out += ",\"indent_radius\":" + json_number(doc.config.indent_radius);
    out += ",\"min_samples_per_decade\":" + std::to_string(doc.config.min_samples_per_decade);
    out += ",\"max_refine_angle_deg\":" + json_number(doc.config.max_refine_angle_deg);
    out += ",\"critical_tol_scale\":" + json_number(doc.critical_tol_scale) + "}";
    out += ",\"open_loop_rhp_poles\":" + std::to_string(r.n_p);
    out += ",\"counts\":" + counts_json(r.n_by_method);
    out += ",\"closed_loop_rhp_poles\":" + std::to_string(r.n_z);
    out += ",\"verdict\":" + json_string(verdict_kind_name(r.verdict.kind));
    out += ",\"verdict_reason\":" +
           (r.verdict.kind == VerdictKind::Marginal ? json_string(r.verdict.reason)
                                                    : std::string("null"));
    out += ",\"crossings\":{\"nyquist\":" + crossing_array_json(r.nyquist_crossings);
    out += ",\"nichols_single\":" + crossing_array_json(r.nichols_single_crossings);
    out += ",\"nichols_multi\":" + crossing_array_json(r.nichols_multi_crossings) + "}";
    out += ",\"oracle\":" + oracle_json(r.oracle);
    out += ",\"oracle_agrees\":" + std::string(r.oracle_agrees ? "true" : "false");
    out += ",\"relative_degree\":" + std::to_string(r.relative_degree);
    out += ",\"improper\":" + std::string(r.improper ? "true" : "false");
    out += ",\"warnings\":[";
    for (std::size_t i = 0; i < r.warnings.size(); ++i) {
        if (i) out += ",";
        out += json_string(r.warnings[i]);
    }
    out += "]}";
    return out;
}

std::string to_text(const ReportDocument& doc) {
    const StabilityReport& r = doc.report;
    std::string out;
    out += "input:              " + doc.tf_input + "\n";
    out += "canonical:          " + doc.tf_text + "\n";
    out += "gain:               " + format_double(doc.gain) + "\n";
    out += "big radius:         " + format_double(doc.config.big_radius) + "\n";
    out += "indent radius:      " + format_double(doc.config.indent_radius) + "\n";
    out += "relative degree:    " + std::to_string(r.relative_degree) +
           (r.improper ? " (improper)" : "") + "\n";
    out += "open-loop RHP:      " + std::to_string(r.n_p) + "\n";
    out += "counts:             nyquist=" + std::to_string(r.n_by_method.nyquist) +
           " nichols_single=" + std::to_string(r.n_by_method.nichols_single) +
           " nichols_multi=" + std::to_string(r.n_by_method.nichols_multi) +
           " winding=" + std::to_string(r.n_by_method.winding) + "\n";
    out += "closed-loop RHP:    " + std::to_string(r.n_z) + "\n";
    out += "verdict:            " + verdict_to_string(r.verdict) + "\n";
    if (r.oracle.note == "skipped") {
        out += "oracle:             skipped\n";
    } else {
        out += "oracle:             roots=" + std::to_string(r.oracle.closed_loop_rhp) +
               " array=" + std::to_string(r.oracle.routh_rhp) +
               (r.oracle.indeterminate ? " indeterminate" : "") +
               " agrees=" + (r.oracle_agrees ? "yes" : "no") + "\n";
        if (!r.oracle.note.empty()) out += "oracle note:        " + r.oracle.note + "\n";
    }
    for (const auto& w : r.warnings) out += "warning:            " + w + "\n";
    if (!r.nyquist_crossings.empty()) {
        out += "crossings (complex plane):\n";
        for (const auto& c : r.nyquist_crossings) out += crossing_text(c);
    }
    if (!r.nichols_single_crossings.empty()) {
        out += "crossings (single-sheet chart):\n";
        for (const auto& c : r.nichols_single_crossings) out += crossing_text(c);
    }
    if (!r.nichols_multi_crossings.empty()) {
        out += "crossings (multi-sheet chart):\n";
        for (const auto& c : r.nichols_multi_crossings) out += crossing_text(c);
    }
    return out;
}

std::string sweep_to_json(const std::vector<SweepEntry>& entries, const std::string& tf_text) {
    std::string out = "{\"schema_version\":\"1\",\"transfer_function\":" +
                      json_string(tf_text) + ",\"entries\":[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const SweepEntry& e = entries[i];
        if (i) out += ",";
        out += "{\"gain\":" + json_number(e.gain);
        out += ",\"verdict\":" + json_string(verdict_kind_name(e.report.verdict.kind));
        out += ",\"closed_loop_rhp\":" + std::to_string(e.report.n_z);
        out += ",\"open_loop_rhp\":" + std::to_string(e.report.n_p);
        out += ",\"counts\":" + counts_json(e.report.n_by_method);
        out += ",\"oracle_agrees\":" + std::string(e.report.oracle_agrees ? "true" : "false");
        out += ",\"reason\":" +
               (e.report.verdict.kind == VerdictKind::Marginal
                    ? json_string(e.report.verdict.reason)
                    : std::string("null"));
        out += "}";
    }
    return out + "]}";
}

std::string sweep_to_text(const std::vector<SweepEntry>& entries) {
    std::string out = "gain            verdict\n";
    for (const SweepEntry& e : entries) {
        std::string g = format_double(e.gain);
        out += g;
        for (std::size_t i = g.size(); i < 16; ++i) out += " ";
        out += verdict_to_string(e.report.verdict) + "\n";
    }
    return out;
}

std::string fuzz_to_json(const FuzzResult& result, std::uint64_t seed, int max_order) {
    std::string out = "{\"schema_version\":\"1\"";
    out += ",\"seed\":" + std::to_string(seed);
    out += ",\"max_order\":" + std::to_string(max_order);
    out += ",\"total\":" + std::to_string(result.total);
    out += ",\"decided\":" + std::to_string(result.decided);
    out += ",\"agreements\":" + std::to_string(result.agreements);
    out += ",\"skipped_marginal\":" + std::to_string(result.skipped_marginal);
    out += ",\"skipped_numeric\":" + std::to_string(result.skipped_numeric);
    out += ",\"disagreements\":[";
    for (std::size_t i = 0; i < result.disagreements.size(); ++i) {
        if (i) out += ",";
        out += json_string(print_tf(result.disagreements[i]));
    }
    return out + "]}";
}

std::string fuzz_to_text(const FuzzResult& result) {
    std::string out;
    out += "total:             " + std::to_string(result.total) + "\n";
    out += "decided:           " + std::to_string(result.decided) + "\n";
    out += "agreements:        " + std::to_string(result.agreements) + "\n";
    out += "skipped marginal:  " + std::to_string(result.skipped_marginal) + "\n";
    out += "skipped numeric:   " + std::to_string(result.skipped_numeric) + "\n";
    if (!result.disagreements.empty()) {
        out += "disagreements:\n";
        for (const auto& tf : result.disagreements) out += "  " + print_tf(tf) + "\n";
    }
    return out;
}

std::string curve_to_csv(const MappedCurve& curve) {
    std::string out = "segment,t,omega,re,im,mag_db,phase_deg\n";
    for (const auto& p : curve.points) {
        out += segment_name(p.segment);
        out += "," + format_double(p.t);
        out += ",";
        if (p.omega) out += format_double(*p.omega);
        out += "," + format_double(p.value.real());
        out += "," + format_double(p.value.imag());
        out += "," + format_double(p.mag_db);
        out += "," + format_double(p.phase_deg);
        out += "\n";
    }
    return out;
}

std::string curve_to_csv(const NicholsCurve& curve) {
    std::string out = "segment,t,omega,re,im,mag_db,phase_deg\n";
    constexpr double kPi = 3.14159265358979323846;
    for (const auto& p : curve.points) {
        double lin = std::pow(10.0, p.mag_db / 20.0);
        double re = lin * std::cos(p.phase_deg * kPi / 180.0);
        double im = lin * std::sin(p.phase_deg * kPi / 180.0);
        out += segment_name(p.segment);
        out += "," + format_double(p.t);
        out += ",";
        if (p.omega) out += format_double(*p.omega);
        out += "," + format_double(re);
        out += "," + format_double(im);
        out += "," + format_double(p.mag_db);
        out += "," + format_double(p.phase_deg);
        out += "\n";
    }
    return out;
}

}  // namespace crossings
