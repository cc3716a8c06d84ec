#include "psidolab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "json.hpp"
#include "psidolab/fourier.hpp"
#include "psidolab/report.hpp"

namespace psidolab::runner {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using report::format_double;

const std::set<std::string> kExperiments = {
    "geometry-check", "quantize-apply", "l2-bound",  "fefferman-sweep", "sharpness",
    "compose-check",  "sobolev-probe",  "bmo-probe", "lplq-check"};

const json& require(const json& j, const std::string& field) {
    if (!j.contains(field)) throw ConfigInvalid("missing field: " + field);
    return j.at(field);
}

double require_number(const json& j, const std::string& field) {
    const json& v = require(j, field);
    if (!v.is_number()) throw ConfigInvalid("field must be numeric: " + field);
    return v.get<double>();
}

std::vector<int> int_list(const json& j, const std::string& field,
                          const std::vector<int>& fallback) {
    if (!j.contains(field)) return fallback;
    std::vector<int> out;
    for (const auto& v : j.at(field)) out.push_back(v.get<int>());
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1]) throw ConfigInvalid("field must be strictly increasing: " + field);
    if (out.empty()) throw ConfigInvalid("field must be non-empty: " + field);
    return out;
}

geometry::ConnectionField parse_gamma(const json& j, int n) {
    const std::string spec = require(j, "gamma").get<std::string>();
    if (spec == "zero") return geometry::ConnectionField::zero(n);
    if (spec.rfind("constant:", 0) == 0) {
        geometry::Christoffel g{};
        const double v = std::stod(spec.substr(9));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) g(i, k, l) = v;
        return geometry::ConnectionField::constant(n, g);
    }
    if (spec == "fourier") {
        const json& coeffs = require(j, "coeffs");
        geometry::ConnectionField::FourierTable t;
        t.n = n;
        for (const auto& row : coeffs) {
            geometry::ConnectionField::FourierTable::Entry e{};
            if (row.size() == 3) {
                // 1D shorthand [mode, re, im] for the single component
                if (n != 1) throw ConfigInvalid("coeffs rows need 7 entries for n=2");
                e.mode0 = row.at(0).get<int>();
                e.re = row.at(1).get<double>();
                e.im = row.at(2).get<double>();
            } else {
                e.i = row.at(0).get<int>();
                e.k = row.at(1).get<int>();
                e.j = row.at(2).get<int>();
                e.mode0 = row.at(3).get<int>();
                e.mode1 = row.at(4).get<int>();
                e.re = row.at(5).get<double>();
                e.im = row.at(6).get<double>();
            }
            t.entries.push_back(e);
        }
        return geometry::ConnectionField::from_fourier(t);
    }
    throw ConfigInvalid("unknown gamma spec: " + spec);
}

symbols::SymbolSpec parse_symbol(const std::string& spec, int n) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = s.find(':', start);
            parts.push_back(s.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return parts;
    };
    const auto parts = split(spec);
    if (parts[0] == "identity")
        return symbols::make_multiplier([](const geometry::Vec&) { return Complex(1, 0); }, 0.0,
                                        1.0, 0.0, n);
    if (parts[0] == "counterexample" && parts.size() == 3)
        return symbols::make_counterexample(std::stod(parts[1]), std::stod(parts[2]), n);
    if ((parts[0] == "bessel" && parts.size() == 2) ||
        (parts[0] == "multiplier" && parts.size() == 3 && parts[1] == "bessel"))
        return symbols::make_bessel(std::stod(parts.back()), n);
    throw ConfigInvalid("unknown symbol spec: " + spec);
}

double rand_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ordered_json sweep_json(const experiments::SweepReport& rep) {
    ordered_json out;
    out["swept"] = rep.swept;
    ordered_json pts = ordered_json::array();
    for (const auto& pt : rep.points) {
        ordered_json p;
        p["param"] = format_double(pt.param);
        p["norm_lb"] = format_double(pt.estimate.value);
        p["method"] = pt.estimate.method;
        p["converged"] = pt.estimate.converged;
        pts.push_back(p);
    }
    out["points"] = pts;
    if (rep.slope_valid) {
        out["slope"] = format_double(rep.slope);
        out["residual"] = format_double(rep.residual);
    }
    ordered_json thr;
    for (const auto& [k, v] : rep.thresholds) thr[k] = format_double(v);
    out["thresholds"] = thr;
    out["verdict"] = rep.verdict.empty() ? (rep.pass ? "pass" : "fail") : rep.verdict;
    return out;
}

struct Emitter {
    std::string dir;
    std::string experiment;

    std::string path(const std::string& name) const { return dir + "/" + name; }

    void emit(const ordered_json& report_body, const experiments::SweepReport* sweep) const {
        report::write_file(path("report.json"), report_body.dump(2) + "\n");
        experiments::SweepReport empty;
        const experiments::SweepReport& rep = sweep ? *sweep : empty;
        report::write_file(path(experiment + ".csv"), report::sweep_csv(rep));
        report::write_file(path(experiment + ".dat"), report::sweep_gnuplot(rep));
    }
};

}  // namespace

void validate_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigInvalid("cannot open config: " + path);
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    const std::string exp = require(cfg, "experiment").get<std::string>();
    if (!kExperiments.count(exp)) throw ConfigInvalid("unknown experiment: " + exp);
    if (exp == "geometry-check") {
        require(cfg, "n");
        require(cfg, "gamma");
    } else if (exp == "quantize-apply") {
        require(cfg, "symbol");
        require(cfg, "N");
    } else if (exp == "l2-bound") {
        require(cfg, "symbol");
    } else if (exp == "fefferman-sweep") {
        require_number(cfg, "rho");
        require_number(cfg, "theta");
    } else if (exp == "sharpness") {
        require_number(cfg, "rho");
        require_number(cfg, "theta");
        require_number(cfg, "p");
    } else if (exp == "sobolev-probe") {
        require_number(cfg, "s");
        require_number(cfg, "p");
        require_number(cfg, "q");
    } else if (exp == "bmo-probe") {
        require_number(cfg, "rho");
    } else if (exp == "lplq-check") {
        require_number(cfg, "rho");
        require_number(cfg, "theta");
        require_number(cfg, "p");
        require_number(cfg, "q");
    }
}

int run_config(const RunOptions& opts) {
    validate_config_file(opts.config_path);
    std::ifstream f(opts.config_path);
    json cfg = json::parse(f);
    const std::string exp = cfg.at("experiment").get<std::string>();
    const int n = cfg.value("n", 1);
    std::uint64_t seed = opts.seed ? *opts.seed : cfg.value("seed", std::uint64_t{1});
    if (opts.threads > 0) cfg["threads"] = opts.threads;
    cfg["seed"] = seed;

    ordered_json body;
    body["experiment"] = exp;
    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    Emitter out{opts.out_dir, exp};
    bool pass = true;
    const experiments::SweepReport* sweep_out = nullptr;
    experiments::SweepReport sweep;

    if (exp == "geometry-check") {
        const auto conn = parse_gamma(cfg, n);
        const auto rep = experiments::geometry_identity_probe(conn);
        body["transport_residual"] = format_double(rep.transport_residual);
        body["determinant_residual"] = format_double(rep.determinant_residual);
        body["reciprocity_residual"] = format_double(rep.reciprocity_residual);
        body["verdict"] = rep.pass ? "pass" : "fail";
        pass = rep.pass;
    } else if (exp == "quantize-apply") {
        const int N = cfg.at("N").get<int>();
        const int M = cfg.value("M", 4 * N);
        const double tau = cfg.value("tau", 0.0);
        cfg["M"] = M;
        cfg["tau"] = tau;
        const auto a = parse_symbol(cfg.at("symbol").get<std::string>(), 1);
        std::mt19937_64 rng(seed);
        std::vector<Complex> coeffs(static_cast<std::size_t>(2 * N + 1));
        for (auto& c : coeffs) c = Complex(2.0 * rand_unit(rng) - 1.0, 2.0 * rand_unit(rng) - 1.0);
        quantize::GridDensity u;
        u.n = 1;
        u.M = M;
        u.kappa = cfg.value("kappa", 0.0);
        u.f = fourier::synthesize(coeffs, N, M);
        const auto au = quantize::toroidal_apply(a, u, tau, N);
        const auto flat = geometry::MetricField::euclidean(1);
        experiments::SweepPoint pt;
        pt.param = N;
        pt.seed = seed;
        pt.estimate.method = "toroidal";
        pt.estimate.value = spaces::lp_norm(au, 2.0, flat);
        sweep.points.push_back(pt);
        sweep_out = &sweep;
        body["output_l2"] = format_double(pt.estimate.value);
        body["output_linf"] =
            format_double(spaces::lp_norm(au, std::numeric_limits<double>::infinity(), flat));
        body["verdict"] = "pass";
    } else if (exp == "l2-bound") {
        const auto a = parse_symbol(cfg.at("symbol").get<std::string>(), 1);
        const auto n_list = int_list(cfg, "N_list", {16, 32, 64, 128, 256});
        sweep = experiments::l2_uniformity_probe(a, geometry::MetricField::euclidean(1),
                                                 geometry::ConnectionField::zero(1), n_list);
        sweep_out = &sweep;
        body["sweep"] = sweep_json(sweep);
        pass = sweep.pass;
    } else if (exp == "fefferman-sweep") {
        const auto interval = experiments::fefferman_interval(
            n, Rational::from_double(cfg.at("rho").get<double>()),
            Rational::from_double(cfg.at("theta").get<double>()));
        body["interval"] = interval.str();
        body["verdict"] = "pass";
    } else if (exp == "sharpness") {
        const auto n_list = int_list(cfg, "N_list", {16, 32, 64, 128, 256});
        sweep = experiments::sharpness_sweep(cfg.at("rho").get<double>(),
                                             cfg.at("theta").get<double>(),
                                             cfg.at("p").get<double>(), n_list, seed);
        sweep_out = &sweep;
        body["sweep"] = sweep_json(sweep);
        pass = sweep.pass;
    } else if (exp == "compose-check") {
        const auto k_list = int_list(cfg, "k_list", {8, 16, 32, 64, 128});
        const auto a = symbols::make_bessel(-0.5, 1);
        symbols::SymbolSpec b;
        b.n = 1;
        b.m = -0.5;
        b.label = "modulated-bessel(-0.5)";
        b.eval = [](const geometry::Point& x, const geometry::Vec& xi) {
            return Complex((1.0 + 0.5 * std::cos(x[0])) * std::pow(1.0 + xi[0] * xi[0], -0.25), 0);
        };
        b.dy = [](const geometry::Point& x, const geometry::Vec& xi) {
            return std::array<Complex, 2>{
                Complex(-0.5 * std::sin(x[0]) * std::pow(1.0 + xi[0] * xi[0], -0.25), 0),
                Complex(0, 0)};
        };
        b.deta = [](const geometry::Point& x, const geometry::Vec& xi) {
            return std::array<Complex, 2>{
                Complex((1.0 + 0.5 * std::cos(x[0])) * -0.5 * xi[0] *
                            std::pow(1.0 + xi[0] * xi[0], -1.25),
                        0),
                Complex(0, 0)};
        };
        sweep = experiments::composition_residual_probe(a, b, k_list);
        sweep_out = &sweep;
        body["sweep"] = sweep_json(sweep);
        pass = sweep.pass;
    } else if (exp == "sobolev-probe") {
        const int trials = cfg.value("trials", 200);
        cfg["trials"] = trials;
        const auto rep = experiments::sobolev_embedding_probe(
            cfg.at("s").get<double>(), cfg.at("p").get<double>(), cfg.at("q").get<double>(),
            trials, seed);
        ordered_json jr;
        for (std::size_t i = 0; i < rep.bands.size(); ++i)
            jr[std::to_string(rep.bands[i])] = format_double(rep.ratios[i]);
        body["ratios"] = jr;
        body["growth"] = format_double(rep.growth);
        body["admissible"] = rep.admissible;
        body["bounded"] = rep.bounded;
        body["verdict"] = rep.pass ? "pass" : "fail";
        pass = rep.pass;
    } else if (exp == "bmo-probe") {
        const double rho = cfg.at("rho").get<double>();
        const int trials = cfg.value("trials", 40);
        cfg["trials"] = trials;
        const auto a = symbols::make_counterexample(rho, (1.0 - rho) / 2.0, 1);
        const auto rep = experiments::bmo_probe(a, rho, trials, seed);
        ordered_json bv = ordered_json::array();
        for (double v : rep.bmo_values) bv.push_back(format_double(v));
        ordered_json rv = ordered_json::array();
        for (double v : rep.ring_norms) rv.push_back(format_double(v));
        body["bmo_values"] = bv;
        body["growth"] = format_double(rep.growth);
        body["ring_norms"] = rv;
        body["ring_spread"] = format_double(rep.ring_spread);
        body["verdict"] = rep.pass ? "pass" : "fail";
        pass = rep.pass;
    } else if (exp == "lplq-check") {
        const auto verdict = experiments::lplq_admissible(
            n, Rational::from_double(cfg.at("rho").get<double>()),
            Rational::from_double(cfg.at("theta").get<double>()),
            Rational::from_double(cfg.at("p").get<double>()),
            Rational::from_double(cfg.at("q").get<double>()));
        body["admissible"] = verdict.admissible;
        body["branch"] = std::string(1, verdict.branch);
        body["normalized_lhs"] = verdict.lhs.str();
        body["printed_sign_note"] = verdict.printed_sign_note;
        body["verdict"] = verdict.admissible ? "pass" : "fail";
        pass = verdict.admissible;
    }

    body["config"] = ordered_json(cfg);
    out.emit(body, sweep_out);
    return pass ? 0 : 2;
}

}  // namespace psidolab::runner
