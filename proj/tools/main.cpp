#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crossings/errors.hpp"
#include "crossings/report.hpp"
#include "crossings/svg_render.hpp"
#include "crossings/verdict.hpp"

namespace {

using namespace crossings;

constexpr int kExitOk = 0;
constexpr int kExitDisagree = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitMarginal = 4;

struct CommonArgs {
    std::string tf_text;
    double gain = 0.0;
    bool gain_set = false;
    double radius = 0.0;
    double indent = 0.0;
    int samples = 64;
    double refine_deg = 5.0;
    double tol = 1e-8;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_gain = true) {
    cmd->add_option("--tf", args.tf_text, "open-loop transfer function expression")
        ->required();
    if (with_gain)
        cmd->add_option("--gain", args.gain, "override the loop gain of the expression")
            ->each([&args](const std::string&) { args.gain_set = true; });
    cmd->add_option("--radius", args.radius,
                    "contour radius (default: derived from pole/zero magnitudes)");
    cmd->add_option("--indent", args.indent,
                    "indent radius around imaginary-axis poles/zeros (default: derived)");
    cmd->add_option("--samples", args.samples, "minimum samples per decade (default 64)");
    cmd->add_option("--refine-deg", args.refine_deg,
                    "refinement bound on the mapped step, degrees (default 5)");
    cmd->add_option("--tol", args.tol, "critical-band scale around -1 (default 1e-8)");
    cmd->add_option("--out", args.out_path, "write output to this file instead of stdout");
}

FactoredTF resolve_tf(const CommonArgs& args) {
    FactoredTF tf = parse_tf(args.tf_text);
    if (args.gain_set) tf = tf.with_gain(args.gain);
    return tf;
}

AssessOptions resolve_opts(const CommonArgs& args) {
    AssessOptions o;
    o.contour.big_radius = args.radius;
    o.contour.indent_radius = args.indent;
    o.contour.min_samples_per_decade = args.samples;
    o.contour.max_refine_angle_deg = args.refine_deg;
    o.critical_tol_scale = args.tol;
    return o;
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot open " << out_path << " for writing\n";
        return kExitNumeric;
    }
    f << text;
    return kExitOk;
}

// "a,b,c" or "lo:hi:n" or "lo:hi:n:log"
std::vector<double> parse_gain_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            std::size_t colon = text.find(':', start);
            parts.push_back(text.substr(start, colon - start));
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
        if (parts.size() < 3 || parts.size() > 4)
            throw std::invalid_argument("gain range must be lo:hi:n or lo:hi:n:log");
        bool log_spaced = parts.size() == 4;
        if (log_spaced && parts[3] != "log")
            throw std::invalid_argument("fourth range field must be 'log'");
        std::size_t used = 0;
        double lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("bad range start");
        double hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("bad range end");
        long n = std::stol(parts[2], &used);
        if (used != parts[2].size() || n < 1) throw std::invalid_argument("bad range count");
        if (log_spaced && (lo <= 0.0 || hi <= 0.0))
            throw std::invalid_argument("log-spaced range needs positive endpoints");
        for (long i = 0; i < n; ++i) {
            double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            out.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
        }
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string item = text.substr(start, comma - start);
        if (!item.empty()) {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("bad gain value: " + item);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int run_analyze(const CommonArgs& args, const std::string& format, bool no_oracle) {
    FactoredTF tf = resolve_tf(args);
    AssessOptions opts = resolve_opts(args);
    opts.run_oracle = !no_oracle;
    StabilityReport rep = assess(tf, opts);

    ReportDocument doc;
    doc.tf_input = args.tf_text;
    doc.tf_text = print_tf(tf);
    doc.gain = tf.gain;
    doc.config = resolve_config(tf, opts.contour);
    doc.critical_tol_scale = opts.critical_tol_scale;
    doc.tf = tf;
    doc.report = rep;

    int rc = emit(format == "json" ? to_json(doc) + "\n" : to_text(doc), args.out_path);
    if (rc != kExitOk) return rc;
    return rep.verdict.kind == VerdictKind::Marginal ? kExitMarginal : kExitOk;
}

int run_curve(const CommonArgs& args, const std::string& kind) {
    FactoredTF tf = resolve_tf(args);
    AssessOptions opts = resolve_opts(args);
    NyquistContour contour = refine(build_contour(tf, opts.contour), tf, opts.contour);
    MappedCurve curve = map_response(tf, contour);
    std::string csv;
    if (kind == "nyquist")
        csv = curve_to_csv(curve);
    else if (kind == "nichols-single")
        csv = curve_to_csv(to_nichols(curve, NicholsMode::Single));
    else
        csv = curve_to_csv(to_nichols(curve, NicholsMode::Multiple));
    return emit(csv, args.out_path);
}

int run_plot(const CommonArgs& args, const std::string& kind, int width, int height) {
    FactoredTF tf = resolve_tf(args);
    AssessOptions opts = resolve_opts(args);
    NyquistContour contour = refine(build_contour(tf, opts.contour), tf, opts.contour);
    MappedCurve curve = map_response(tf, contour);
    PlotOptions popts;
    popts.width = width;
    popts.height = height;

    DetectOptions dopts;
    dopts.tol_scale = args.tol;
    NicholsDetectOptions nopts;
    nopts.tol_scale = args.tol;

    std::string svg;
    if (kind == "nyquist") {
        std::vector<Crossing> crossings;
        try {
            crossings = detect_ray_crossings(curve, tf, contour, dopts);
        } catch (const CriticalPointHitError&) {
        }
        svg = render_nyquist_svg(curve, crossings, popts);
    } else {
        NicholsMode mode =
            kind == "nichols-single" ? NicholsMode::Single : NicholsMode::Multiple;
        NicholsCurve nc = to_nichols(curve, mode);
        std::vector<Crossing> crossings;
        try {
            crossings = detect_nichols_crossings(nc, tf, contour, nopts);
        } catch (const CriticalPointHitError&) {
        }
        svg = render_nichols_svg(nc, crossings, popts);
    }
    return emit(svg, args.out_path);
}

int run_sweep(const CommonArgs& args, const std::string& gains_text,
              const std::string& format) {
    std::vector<double> gains = parse_gain_list(gains_text);
    if (gains.empty()) {
        std::cerr << "sweep needs at least one gain\n";
        return kExitUsage;
    }
    FactoredTF tf = parse_tf(args.tf_text);
    AssessOptions opts = resolve_opts(args);
    std::vector<SweepEntry> entries = gain_sweep(tf, gains, opts);
    std::string text = format == "json" ? sweep_to_json(entries, print_tf(tf)) + "\n"
                                        : sweep_to_text(entries);
    return emit(text, args.out_path);
}

int run_verify(std::uint64_t seed, int count, int max_order, const std::string& format,
               const std::string& out_path) {
    FuzzResult result = fuzz_verify(seed, count, max_order);
    std::string text = format == "json" ? fuzz_to_json(result, seed, max_order) + "\n"
                                        : fuzz_to_text(result);
    int rc = emit(text, out_path);
    if (rc != kExitOk) return rc;
    return result.disagreements.empty() ? kExitOk : kExitDisagree;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-loop stability from signed crossings of the open-loop response"};
    app.require_subcommand(1);

    CommonArgs analyze_args, curve_args, plot_args, sweep_args;
    std::string analyze_format = "text", sweep_format = "text", verify_format = "text";
    bool no_oracle = false;
    std::string curve_kind = "nyquist", plot_kind = "nyquist";
    std::string gains_text;
    int plot_width = 900, plot_height = 700;
    std::uint64_t verify_seed = 1;
    int verify_count = 100, verify_max_order = 6;
    std::string verify_out;

    CLI::App* analyze = app.add_subcommand("analyze", "decide closed-loop stability");
    add_common(analyze, analyze_args);
    analyze->add_option("--format", analyze_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    analyze->add_flag("--no-oracle", no_oracle, "skip the closed-loop root cross-check");

    CLI::App* curve = app.add_subcommand("curve", "dump the mapped curve as CSV");
    add_common(curve, curve_args);
    curve->add_option("--kind", curve_kind, "nyquist, nichols-single, or nichols-multi")
        ->check(CLI::IsMember({"nyquist", "nichols-single", "nichols-multi"}));

    CLI::App* plot = app.add_subcommand("plot", "render the curve as SVG");
    add_common(plot, plot_args);
    plot->add_option("--kind", plot_kind, "nyquist, nichols-single, or nichols-multi")
        ->check(CLI::IsMember({"nyquist", "nichols-single", "nichols-multi"}));
    plot->add_option("--width", plot_width, "image width in pixels");
    plot->add_option("--height", plot_height, "image height in pixels");

    CLI::App* sweep = app.add_subcommand("sweep", "assess a list or range of gains");
    add_common(sweep, sweep_args, /*with_gain=*/false);
    sweep->add_option("--gains", gains_text, "comma list 'a,b,c' or range 'lo:hi:n[:log]'")
        ->required();
    sweep->add_option("--format", sweep_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* verify = app.add_subcommand("verify", "random differential check vs the oracle");
    verify->add_option("--count", verify_count, "number of random plants (default 100)");
    verify->add_option("--seed", verify_seed, "RNG seed (default 1)");
    verify->add_option("--max-order", verify_max_order, "maximum denominator order (default 6)");
    verify->add_option("--format", verify_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--out", verify_out, "write output to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp"
                   ? kExitOk
                   : kExitUsage;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_args, analyze_format, no_oracle);
        if (curve->parsed()) return run_curve(curve_args, curve_kind);
        if (plot->parsed()) return run_plot(plot_args, plot_kind, plot_width, plot_height);
        if (sweep->parsed()) return run_sweep(sweep_args, gains_text, sweep_format);
        if (verify->parsed())
            return run_verify(verify_seed, verify_count, verify_max_order, verify_format,
                              verify_out);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DegreeError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IndeterminateError& e) {
        std::cerr << "indeterminate: " << e.what() << "\n";
        return kExitMarginal;
    } catch (const CriticalPointHitError& e) {
        std::cerr << "marginal: " << e.what() << "\n";
        return kExitMarginal;
    } catch (const MarginalPoleError& e) {
        std::cerr << "marginal: " << e.what() << "\n";
        return kExitMarginal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
