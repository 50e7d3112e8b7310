// ghostsim: scenario-driven front end for the ghost-imaging library.
//
// Subcommands: image, propagate, contrast, relay, construct, montecarlo,
// compare. Each run writes a scan CSV plus a manifest carrying the fully
// resolved configuration, so any output is reproducible from its manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ghostsim/imaging.hpp"
#include "ghostsim/mat_io.hpp"
#include "ghostsim/montecarlo.hpp"
#include "ghostsim/relay.hpp"
#include "ghostsim/construction.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ghostsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    // A manifest may be fed back in as a config.
    if (j.contains("config"))
        j = j.at("config");
    if (j.value("schema", "") != "ghostsim-config/1")
        throw ConfigError("schema: expected \"ghostsim-config/1\"");
    return j;
}

double require_positive(const json& j, const std::string& section, const char* key) {
    if (!j.contains(key))
        throw ConfigError(section + "." + key + ": missing");
    const double v = j.at(key).get<double>();
    if (!(v > 0.0))
        throw ConfigError(section + "." + key + ": must be > 0");
    return v;
}

struct Scenario {
    json resolved;
    GaussianSchellParams params;
    SourcePreset preset = SourcePreset::thermal_max;
    PropagationGeometry geometry;
    TransverseGrid grid;
    DetectionSetup setup;
    BucketRegion bucket;
    bool ac_coupling = false;
};

SourcePreset parse_preset(const std::string& name) {
    if (name == "thermal_max")
        return SourcePreset::thermal_max;
    if (name == "classical_ps_max")
        return SourcePreset::classical_ps_max;
    if (name == "quantum_ps_max")
        return SourcePreset::quantum_ps_max;
    throw ConfigError("source.preset: unknown preset \"" + name + "\"");
}

MaskSpec build_mask(const json& m, const TransverseGrid& grid) {
    const std::string shape = m.value("shape", "uniform");
    if (shape == "uniform")
        return mask_uniform(grid);
    if (shape == "point")
        return mask_point(grid, m.value("center", 0.0));
    if (shape == "slit")
        return mask_slit(grid, m.value("center", 0.0), require_positive(m, "mask", "width"));
    if (shape == "double_slit")
        return mask_double_slit(grid, require_positive(m, "mask", "separation"),
                                require_positive(m, "mask", "width"));
    if (shape == "gaussian")
        return mask_gaussian(grid, require_positive(m, "mask", "width"));
    if (shape == "file") {
        const std::string path = m.value("path", "");
        if (path.empty())
            throw ConfigError("mask.path: missing for shape \"file\"");
        const CMatrix mat = read_ghostmat_file(path);
        if (mat.rows() != 1 && mat.cols() != 1)
            throw ConfigError("mask.path: expected a 1 x n or n x 1 GHOSTMAT vector");
        std::vector<Complex> t(static_cast<std::size_t>(mat.size()));
        for (Eigen::Index i = 0; i < mat.size(); ++i)
            t[static_cast<std::size_t>(i)] = mat(i);
        if (static_cast<int>(t.size()) != grid.n)
            throw ConfigError("mask.path: length does not match grid.n");
        return mask_from_values(grid, std::move(t));
    }
    throw ConfigError("mask.shape: unknown shape \"" + shape + "\"");
}

Scenario parse_scenario(const json& cfg, int grid_override, std::optional<std::uint64_t> seed) {
    Scenario sc;
    json r = cfg;

    if (!cfg.contains("source"))
        throw ConfigError("source: missing");
    const json& src = cfg.at("source");
    sc.preset = parse_preset(src.value("preset", "thermal_max"));
    sc.params.photon_flux = require_positive(src, "source", "photon_flux");
    sc.params.intensity_radius = require_positive(src, "source", "intensity_radius");
    sc.params.coherence_radius = require_positive(src, "source", "coherence_radius");
    sc.params.coherence_time = require_positive(src, "source", "coherence_time");
    r["source"]["preset"] = src.value("preset", "thermal_max");

    if (!cfg.contains("geometry"))
        throw ConfigError("geometry: missing");
    sc.geometry.distance = require_positive(cfg.at("geometry"), "geometry", "distance");
    sc.geometry.wavenumber = require_positive(cfg.at("geometry"), "geometry", "wavenumber");

    if (!cfg.contains("grid"))
        throw ConfigError("grid: missing");
    int n = cfg.at("grid").value("n", 0);
    if (grid_override > 0)
        n = grid_override;
    const double spacing = require_positive(cfg.at("grid"), "grid", "spacing");
    if (n <= 1)
        throw ConfigError("grid.n: must be > 1");
    sc.grid = TransverseGrid(n, spacing);
    r["grid"]["n"] = n;

    const json det = cfg.value("detection", json::object());
    sc.setup.quantum_efficiency = det.value("quantum_efficiency", 1.0);
    sc.setup.pinhole_area = det.value("pinhole_area", 1.0);
    sc.setup.filter_width = det.value("filter_width", sc.params.coherence_time / 2.0);
    sc.setup.electron_charge = det.value("electron_charge", 1.0);
    try {
        sc.setup.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("detection: ") + e.what());
    }
    if (det.contains("bucket_half_width") && !det.at("bucket_half_width").is_null())
        sc.bucket = BucketRegion::centered(det.at("bucket_half_width").get<double>());
    r["detection"] = {{"quantum_efficiency", sc.setup.quantum_efficiency},
                      {"pinhole_area", sc.setup.pinhole_area},
                      {"filter_width", sc.setup.filter_width},
                      {"electron_charge", sc.setup.electron_charge},
                      {"bucket_half_width", sc.bucket.half_width
                                                ? json(*sc.bucket.half_width)
                                                : json(nullptr)}};

    const json img = cfg.value("image", json::object());
    sc.ac_coupling = img.value("ac_coupling", false);
    r["image"] = {{"method", img.value("method", "analytic")},
                  {"regime", img.value("regime", "auto")},
                  {"ac_coupling", sc.ac_coupling}};

    if (!cfg.contains("mask"))
        throw ConfigError("mask: missing");
    r["mask"] = cfg.at("mask");

    json mc = cfg.value("montecarlo", json::object());
    if (seed)
        mc["seed"] = *seed;
    if (!mc.contains("seed"))
        mc["seed"] = 1;
    if (!mc.contains("samples"))
        mc["samples"] = 2000;
    if (!mc.contains("time_step"))
        mc["time_step"] = sc.setup.filter_width / 8.0;
    if (!mc.contains("time_points"))
        mc["time_points"] = 160;
    r["montecarlo"] = mc;

    if (cfg.contains("relay"))
        r["relay"] = cfg.at("relay");
    if (cfg.contains("construct"))
        r["construct"] = cfg.at("construct");
    if (cfg.contains("output"))
        r["output"] = cfg.at("output");

    sc.resolved = r;
    return sc;
}

TemporalConstants scenario_constants(const Scenario& sc) {
    const TemporalCorrelation rc = classical_temporal(sc.params, TemporalFlavor::pi_cross);
    const TemporalCorrelation rp = classical_temporal(sc.params, TemporalFlavor::ps_cross);
    const TemporalCorrelation rq(sc.params.coherence_time, TemporalFlavor::ps_cross);
    switch (sc.preset) {
    case SourcePreset::thermal_max:
        return temporal_constants(&rc, nullptr, sc.setup);
    case SourcePreset::classical_ps_max:
        return temporal_constants(nullptr, &rp, sc.setup);
    case SourcePreset::quantum_ps_max:
    default:
        if (sc.params.brightness() > kBrightnessHighGate)
            return temporal_constants(nullptr, &rp, sc.setup);
        return temporal_constants(nullptr, &rq, sc.setup);
    }
}

void write_scan_csv(const fs::path& path, const ImageScan& scan, bool ac_coupling,
                    const std::vector<double>* stderr_col = nullptr) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << "position_m,C_total,C0,pi_term,ps_term";
    if (stderr_col)
        f << ",stderr";
    f << "\n";
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const double total =
            ac_coupling ? scan.total[i] - scan.background[i] : scan.total[i];
        f << format_g17(scan.positions[i]) << ',' << format_g17(total) << ','
          << format_g17(scan.background[i]) << ',' << format_g17(scan.pi_term[i]) << ','
          << format_g17(scan.ps_term[i]);
        if (stderr_col)
            f << ',' << format_g17((*stderr_col)[i]);
        f << "\n";
    }
}

struct ScanFile {
    std::vector<double> positions, total, background, pi_term, ps_term, stderr_col;
};

ScanFile read_scan_csv(const fs::path& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(f, line))
        throw IoError("empty scan file " + path.string());
    const bool has_stderr = line.find("stderr") != std::string::npos;
    ScanFile s;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        double x, t, c0, pi, ps, se = 0.0;
        if (!(is >> x >> t >> c0 >> pi >> ps))
            throw IoError("malformed scan row in " + path.string());
        if (has_stderr)
            is >> se;
        s.positions.push_back(x);
        s.total.push_back(t);
        s.background.push_back(c0);
        s.pi_term.push_back(pi);
        s.ps_term.push_back(ps);
        s.stderr_col.push_back(se);
    }
    return s;
}

json fresnel_json(const FresnelReport& fr) {
    return {{"d0", fr.d0},          {"d_coh", fr.d_coh},
            {"dn", fr.dn},          {"df", fr.df},
            {"a_far", fr.a_far},    {"rho_far", fr.rho_far},
            {"regime_pi", to_string(fr.regime_pi)},
            {"regime_ps", to_string(fr.regime_ps)}};
}

/// Classification without the quantum brightness-gate refusal (the gate is
/// reported, not thrown, in manifests).
json classification_json(const Scenario& sc) {
    try {
        const SourceSpectra sp = source_spectra(sc.params, sc.preset);
        const Classification c =
            classify_state(sp.gn, sp.gn_cross ? &*sp.gn_cross : nullptr,
                           sp.gp_cross ? &*sp.gp_cross : nullptr);
        return to_string(c);
    } catch (const Error& e) {
        return json{{"error", e.what()}};
    }
}

void add_psf_measurements(json& derived, const ImageScan& scan, const json& mask_cfg) {
    const std::string shape = mask_cfg.value("shape", "uniform");
    try {
        if (shape == "point") {
            const PsfMeasurement m = measure_psf(scan);
            derived["psf_e2_radius"] = m.e2_radius;
            derived["psf_peak_position"] = m.peak_position;
        } else if (shape == "uniform") {
            derived["envelope_e2_radius"] = measure_envelope_radius(scan);
        }
    } catch (const Error&) {
        // Leave measurements out when the scan has no measurable peak.
    }
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& resolved,
                    const json& derived, const json& outputs) {
    json m{{"schema", "ghostsim-manifest/1"},
           {"command", command},
           {"config", resolved},
           {"derived", derived},
           {"outputs", outputs}};
    std::ofstream f(out_dir / "manifest.json");
    if (!f)
        throw IoError("cannot write manifest.json");
    f << m.dump(2) << "\n";
}

void write_pgm_16(const fs::path& path, const std::vector<std::vector<double>>& img) {
    const std::size_t rows = img.size();
    const std::size_t cols = rows ? img[0].size() : 0;
    double lo = 0.0, hi = 0.0;
    for (const auto& row : img)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << "P5\n" << cols << ' ' << rows << "\n65535\n";
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    for (const auto& row : img)
        for (double v : row) {
            const auto u = static_cast<unsigned>(std::lround((v - lo) * scale));
            f.put(static_cast<char>((u >> 8) & 0xff));
            f.put(static_cast<char>(u & 0xff));
        }
}

/// Separable 2D image assembled from the 1D factors of a square scenario.
void maybe_write_pgm(const fs::path& out_dir, const Scenario& sc, const ImageScan& scan,
                     bool want_pgm, json& outputs) {
    if (!want_pgm)
        return;
    const std::size_t n = scan.size();
    const double curr = sc.setup.current_scale();
    const double cm = std::max(scan.cn, scan.cp);
    std::vector<std::vector<double>> img(n, std::vector<double>(n, 0.0));
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double bg = scan.background[iy] * scan.background[ix] / curr;
            const double term =
                cm > 0.0 ? (scan.pi_term[iy] + scan.ps_term[iy]) *
                               (scan.pi_term[ix] + scan.ps_term[ix]) / cm
                         : 0.0;
            img[iy][ix] = bg + term;
        }
    write_pgm_16(out_dir / "image.pgm", img);
    outputs["image_pgm"] = "image.pgm";
}

int dispatch(const std::string& command, const json& cfg, const fs::path& out_dir,
             int grid_override, std::optional<std::uint64_t> seed, const std::string& format);

int run_image(const Scenario& sc, const json& cfg, const fs::path& out_dir,
              const std::string& format) {
    const MaskSpec mask = build_mask(cfg.at("mask"), sc.grid);
    const FresnelReport fr = fresnel_report(sc.params, sc.geometry);
    const std::string method = cfg.value("image", json::object()).value("method", "analytic");
    const std::string regime_cfg = cfg.value("image", json::object()).value("regime", "auto");

    ImageScan scan;
    MaskSpec used_mask = mask;
    if (method == "analytic") {
        Regime regime = sc.preset == SourcePreset::thermal_max ? fr.regime_pi : fr.regime_ps;
        if (regime_cfg == "near")
            regime = Regime::near;
        else if (regime_cfg == "far")
            regime = Regime::far;
        else if (regime_cfg != "auto")
            throw ConfigError("image.regime: expected near, far or auto");
        scan = analytic_image(regime, sc.preset, sc.params, sc.geometry, mask, sc.bucket,
                              sc.setup);
    } else if (method == "numeric") {
        const SourceState state = make_source(sc.preset, sc.params, sc.grid);
        const TemporalConstants constants = scenario_constants(sc);
        const CorrelationKernel auto_det = propagate_pi(state.auto_kernel, sc.geometry);
        std::optional<CorrelationKernel> pi_det, ps_det;
        if (state.pi_cross)
            pi_det = propagate_pi(*state.pi_cross, sc.geometry,
                                  std::optional<TransverseGrid>(auto_det.grid));
        if (state.ps_cross)
            ps_det = propagate_ps(*state.ps_cross, sc.geometry,
                                  std::optional<TransverseGrid>(auto_det.grid));
        used_mask = build_mask(cfg.at("mask"), auto_det.grid);
        scan = ghost_image(pi_det ? &*pi_det : nullptr, ps_det ? &*ps_det : nullptr, auto_det,
                           used_mask, sc.bucket, sc.setup, constants);
    } else {
        throw ConfigError("image.method: expected analytic or numeric");
    }

    write_scan_csv(out_dir / "scan.csv", scan, sc.ac_coupling);
    json outputs{{"scan_csv", "scan.csv"}};
    maybe_write_pgm(out_dir, sc, scan,
                    format == "pgm" ||
                        cfg.value("output", json::object()).value("pgm", false),
                    outputs);

    json derived{{"fresnel", fresnel_json(fr)},
                 {"cn", scan.cn},
                 {"cp", scan.cp},
                 {"ct_classical", ct_classical(sc.setup.filter_width, sc.params.coherence_time)},
                 {"ct_quantum", ct_quantum(sc.setup.filter_width, sc.params.coherence_time)},
                 {"classification", classification_json(sc)},
                 {"brightness", sc.params.brightness()}};
    add_psf_measurements(derived, scan, cfg.at("mask"));
    try {
        const ContrastKind kind = sc.preset == SourcePreset::quantum_ps_max
                                      ? ContrastKind::quantum
                                      : ContrastKind::classical;
        const ContrastReport crep = contrast(scan, used_mask, sc.params, sc.setup, kind);
        derived["contrast"] = {{"contrast", crep.contrast}, {"cs", crep.cs}, {"ct", crep.ct}};
    } catch (const Error&) {
        // contrast is undefined for this scan (e.g. empty mask); omit it
    }
    write_manifest(out_dir, "image", sc.resolved, derived, outputs);
    return kExitOk;
}

int run_montecarlo(const Scenario& sc, const json& cfg, const fs::path& out_dir) {
    const MaskSpec mask = build_mask(cfg.at("mask"), sc.grid);
    const SourceState state = make_source(sc.preset, sc.params, sc.grid);
    const json mc = sc.resolved.at("montecarlo");
    const TimeGrid tg(mc.at("time_points").get<int>(), mc.at("time_step").get<double>());
    const int samples = mc.at("samples").get<int>();
    const std::uint64_t seed = mc.at("seed").get<std::uint64_t>();

    const FieldEnsemble ens = sample_fields(state, tg, samples, seed);
    const McImageScan est = estimate_image(ens, mask, sc.bucket, sc.setup);

    // Analytic reference defines the CSV decomposition; the estimate and its
    // standard error ride alongside.
    const TemporalConstants constants = scenario_constants(sc);
    const ImageScan analytic =
        ghost_image(state.pi_cross ? &*state.pi_cross : nullptr,
                    state.ps_cross ? &*state.ps_cross : nullptr, state.auto_kernel, mask,
                    sc.bucket, sc.setup, constants);

    ImageScan scan = analytic;
    scan.total = est.estimate;
    write_scan_csv(out_dir / "scan.csv", scan, false, &est.std_error);

    json outputs{{"scan_csv", "scan.csv"}};
    const int dump = mc.value("dump_ensemble", 0);
    if (dump > 0) {
        // First `dump` signal samples stacked row-wise: (dump * nx) x nt.
        const int keep = std::min(dump, samples);
        CMatrix stacked(static_cast<Eigen::Index>(keep) * sc.grid.n, tg.n);
        for (int s = 0; s < keep; ++s)
            stacked.middleRows(static_cast<Eigen::Index>(s) * sc.grid.n, sc.grid.n) =
                ens.signal_sample(s);
        write_ghostmat_file((out_dir / "ensemble_signal.ghostmat").string(), stacked);
        outputs["ensemble_signal"] = "ensemble_signal.ghostmat";
    }

    double median_se = 0.0;
    {
        std::vector<double> se = est.std_error;
        std::sort(se.begin(), se.end());
        median_se = se[se.size() / 2];
    }
    json derived{{"classification", to_string(state.classification)},
                 {"samples", samples},
                 {"seed", seed},
                 {"median_stderr", median_se},
                 {"cn", analytic.cn},
                 {"cp", analytic.cp}};
    write_manifest(out_dir, "montecarlo", sc.resolved, derived, outputs);
    return kExitOk;
}

int run_propagate(const Scenario& sc, const json& cfg, const fs::path& out_dir) {
    const FresnelReport fr = fresnel_report(sc.params, sc.geometry);
    const SourceState state = make_source(sc.preset, sc.params, sc.grid);

    json outputs;
    const CorrelationKernel auto_det = propagate_pi(state.auto_kernel, sc.geometry);
    write_ghostmat_file((out_dir / "auto_kernel.ghostmat").string(), auto_det.values);
    outputs["auto_kernel"] = "auto_kernel.ghostmat";
    if (state.pi_cross) {
        const auto k = propagate_pi(*state.pi_cross, sc.geometry,
                                    std::optional<TransverseGrid>(auto_det.grid));
        write_ghostmat_file((out_dir / "pi_cross_kernel.ghostmat").string(), k.values);
        outputs["pi_cross_kernel"] = "pi_cross_kernel.ghostmat";
    }
    if (state.ps_cross) {
        const auto k = propagate_ps(*state.ps_cross, sc.geometry,
                                    std::optional<TransverseGrid>(auto_det.grid));
        write_ghostmat_file((out_dir / "ps_cross_kernel.ghostmat").string(), k.values);
        outputs["ps_cross_kernel"] = "ps_cross_kernel.ghostmat";
    }
    outputs["grid"] = {{"n", auto_det.grid.n}, {"spacing", auto_det.grid.spacing}};

    json derived{{"fresnel", fresnel_json(fr)},
                 {"flux_in", state.auto_kernel.diagonal_flux()},
                 {"flux_out", auto_det.diagonal_flux()},
                 {"classification", to_string(state.classification)}};
    write_manifest(out_dir, "propagate", sc.resolved, derived, outputs);
    return kExitOk;
}

int run_contrast(const Scenario& sc, const json& cfg, const fs::path& out_dir,
                 const std::string& format) {
    const MaskSpec mask = build_mask(cfg.at("mask"), sc.grid);
    const FresnelReport fr = fresnel_report(sc.params, sc.geometry);
    const Regime regime = sc.preset == SourcePreset::thermal_max ? fr.regime_pi : fr.regime_ps;
    const ImageScan scan =
        analytic_image(regime, sc.preset, sc.params, sc.geometry, mask, sc.bucket, sc.setup);
    const ContrastKind kind = sc.preset == SourcePreset::quantum_ps_max
                                  ? ContrastKind::quantum
                                  : ContrastKind::classical;
    const ContrastReport rep = contrast(scan, mask, sc.params, sc.setup, kind);

    write_scan_csv(out_dir / "scan.csv", scan, sc.ac_coupling);
    json derived{{"fresnel", fresnel_json(fr)},
                 {"contrast", rep.contrast},
                 {"cs", rep.cs},
                 {"ct", rep.ct},
                 {"kind", kind == ContrastKind::quantum ? "quantum" : "classical"},
                 {"binary_approximation_applied", rep.binary_approximation_applied}};
    if (rep.binary_approximation_applied) {
        derived["cs_binary_approx"] = rep.cs_binary_approx;
        derived["mask_area_2d"] = rep.mask_area_2d;
    }
    json outputs{{"scan_csv", "scan.csv"}};
    maybe_write_pgm(out_dir, sc, scan, format == "pgm", outputs);
    write_manifest(out_dir, "contrast", sc.resolved, derived, outputs);
    return kExitOk;
}

int run_relay(const Scenario& sc, const json& cfg, const fs::path& out_dir) {
    if (!cfg.contains("relay"))
        throw ConfigError("relay: missing");
    const json& rj = cfg.at("relay");
    RelayConfig rc;
    rc.object_to_bucket = require_positive(rj, "relay", "object_to_bucket");
    rc.d1 = require_positive(rj, "relay", "d1");
    rc.d2 = require_positive(rj, "relay", "d2");
    rc.focal_length = require_positive(rj, "relay", "focal_length");
    try {
        rc.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("relay: ") + e.what());
    }
    RelayBucket bucket;
    if (rj.contains("bucket_half_width") && !rj.at("bucket_half_width").is_null())
        bucket.half_width = rj.at("bucket_half_width").get<double>();

    const MaskSpec mask = build_mask(cfg.at("mask"), sc.grid);
    const SourceState state = make_source(sc.preset, sc.params, sc.grid);
    const TemporalConstants constants = scenario_constants(sc);
    const ImageScan scan = relay_image(
        state.auto_kernel, state.pi_cross ? &*state.pi_cross : nullptr,
        state.ps_cross ? &*state.ps_cross : nullptr, mask, rc, sc.geometry.wavenumber,
        sc.setup, constants, bucket);

    write_scan_csv(out_dir / "scan.csv", scan, sc.ac_coupling);
    json derived{{"magnification", rc.magnification()},
                 {"cn", scan.cn},
                 {"cp", scan.cp},
                 {"classification", to_string(state.classification)}};
    add_psf_measurements(derived, scan, cfg.at("mask"));
    write_manifest(out_dir, "relay", sc.resolved, derived, json{{"scan_csv", "scan.csv"}});
    return kExitOk;
}

int run_construct(const json& cfg, const fs::path& out_dir) {
    if (!cfg.contains("construct"))
        throw ConfigError("construct: missing");
    const json& cj = cfg.at("construct");
    const std::string path_n = cj.value("kernel_n", "");
    const std::string path_p = cj.value("kernel_p", "");
    if (path_n.empty() || path_p.empty())
        throw ConfigError("construct.kernel_n / construct.kernel_p: missing");
    const double tol = cj.value("tolerance", 1e-8);

    PrescribedKernels pk;
    pk.kn = read_ghostmat_file(path_n);
    pk.kp = read_ghostmat_file(path_p);

    const ModalDecomposition d = svd_decompose(pk, tol);
    const ClassicalModalState st = build_classical_state(d);
    const auto [kn_rec, kp_rec] = reconstruct_cross_correlations(st, d);
    const ClassicalityReport rep = verify_classical(st);

    write_ghostmat_file((out_dir / "kn_reconstructed.ghostmat").string(), kn_rec);
    write_ghostmat_file((out_dir / "kp_reconstructed.ghostmat").string(), kp_rec);

    const double err_n =
        pk.kn.norm() > 0.0 ? (kn_rec - pk.kn).norm() / pk.kn.norm() : 0.0;
    const double err_p =
        pk.kp.norm() > 0.0 ? (kp_rec - pk.kp).norm() / pk.kp.norm() : 0.0;

    json derived{{"rank_n", d.rank_n()},
                 {"rank_p", d.rank_p()},
                 {"tolerance", tol},
                 {"reconstruction_error_n", err_n},
                 {"reconstruction_error_p", err_p},
                 {"classical", rep.classical}};
    if (!d.eta.empty())
        derived["eta_max"] = d.eta.front();
    if (!d.mu.empty())
        derived["mu_max"] = d.mu.front();

    json resolved{{"schema", "ghostsim-config/1"}, {"construct", cj}};
    write_manifest(out_dir, "construct", resolved, derived,
                   json{{"kn_reconstructed", "kn_reconstructed.ghostmat"},
                        {"kp_reconstructed", "kp_reconstructed.ghostmat"}});

    if (err_n > tol || err_p > tol || !rep.classical)
        throw Error("construction failed to reproduce the prescribed kernels");
    return kExitOk;
}

int run_compare(const json& cfg, const fs::path& out_dir) {
    if (!cfg.contains("compare"))
        throw ConfigError("compare: missing");
    const fs::path a = cfg.at("compare").value("run_a", "");
    const fs::path b = cfg.at("compare").value("run_b", "");
    const ScanFile sa = read_scan_csv(a / "scan.csv");
    const ScanFile sb = read_scan_csv(b / "scan.csv");
    if (sa.positions != sb.positions)
        throw GridMismatch("the two scans use different position grids");

    double max_rel = 0.0, mean_rel = 0.0, scale = 0.0;
    for (double v : sa.total)
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < sa.total.size(); ++i) {
        const double d = std::abs(sa.total[i] - sb.total[i]) / (scale > 0.0 ? scale : 1.0);
        max_rel = std::max(max_rel, d);
        mean_rel += d;
    }
    mean_rel /= static_cast<double>(sa.total.size());

    const auto to_scan = [](const ScanFile& s) {
        ImageScan scan;
        scan.positions = s.positions;
        scan.total = s.total;
        scan.background = s.background;
        scan.pi_term = s.pi_term;
        scan.ps_term = s.ps_term;
        return scan;
    };
    json derived{{"max_relative_difference", max_rel},
                 {"mean_relative_difference", mean_rel}};
    try {
        const PsfMeasurement ma = measure_psf(to_scan(sa));
        const PsfMeasurement mb = measure_psf(to_scan(sb));
        derived["psf_radius_a"] = ma.e2_radius;
        derived["psf_radius_b"] = mb.e2_radius;
        derived["psf_radius_ratio"] = ma.e2_radius / mb.e2_radius;
        derived["peak_position_a"] = ma.peak_position;
        derived["peak_position_b"] = mb.peak_position;
        derived["peak_position_sum"] = ma.peak_position + mb.peak_position;
        derived["e2_radius_ratio"] = ma.e2_radius / mb.e2_radius;
    } catch (const Error&) {
        // scans without a measurable image term still get the difference metrics
    }

    json resolved{{"schema", "ghostsim-config/1"}, {"compare", cfg.at("compare")}};
    write_manifest(out_dir, "compare", resolved, derived, json::object());
    std::cout << derived.dump(2) << "\n";
    return kExitOk;
}

int dispatch(const std::string& command, const json& cfg, const fs::path& out_dir,
             int grid_override, std::optional<std::uint64_t> seed, const std::string& format) {
    if (command == "construct")
        return run_construct(cfg, out_dir);
    if (command == "compare")
        return run_compare(cfg, out_dir);

    const Scenario sc = parse_scenario(cfg, grid_override, seed);
    if (command == "image")
        return run_image(sc, cfg, out_dir, format);
    if (command == "montecarlo")
        return run_montecarlo(sc, cfg, out_dir);
    if (command == "propagate")
        return run_propagate(sc, cfg, out_dir);
    if (command == "contrast")
        return run_contrast(sc, cfg, out_dir, format);
    if (command == "relay")
        return run_relay(sc, cfg, out_dir);
    throw ConfigError("unknown command " + command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-state ghost-imaging simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    int grid_override = 0;
    std::optional<std::uint64_t> seed;

    const std::vector<std::string> commands{"image",     "propagate", "contrast", "relay",
                                            "construct", "montecarlo", "compare"};
    for (const std::string& name : commands)
        app.add_subcommand(name)->fallthrough();

    app.add_option("--config", config_path, "scenario configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid_override, "override grid.n");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override montecarlo.seed");
    app.add_option("--format", format, "csv or pgm")->check(CLI::IsMember({"csv", "pgm"}));

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0)
        seed = seed_value;

    try {
        const json cfg = load_config(config_path);
        fs::create_directories(out_dir);
        const std::string command = app.get_subcommands().front()->get_name();
        return dispatch(command, cfg, out_dir, grid_override, seed, format);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
