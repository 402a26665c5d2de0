// Python bindings for the qscomm core: simulation, information metrics,
// frequency response, and sensitivity analysis.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include <json.hpp>

#include "qscomm/analysis.hpp"
#include "qscomm/config_io.hpp"
#include "qscomm/engine.hpp"
#include "qscomm/freq.hpp"
#include "qscomm/info.hpp"
#include "qscomm/sensitivity.hpp"
#include "qscomm/version.hpp"

namespace py = pybind11;
using namespace qscomm;
using nlohmann::json;

namespace {

SimConfig config_from_pyjson(const std::string& config_json) {
    return config_from_json(json::parse(config_json));
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
    py::array_t<double> out({static_cast<py::ssize_t>(v.size())});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_numpy(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    const auto* p = a.data();
    return std::vector<double>(p, p + a.size());
}

py::dict trajectory_to_dict(const Trajectory& tr) {
    py::dict d;
    d["times"] = to_numpy(tr.times);
    d["a"] = to_numpy(tr.a);
    for (int s = 0; s < 2; ++s) {
        const std::string pop = s == 0 ? "pop1" : "pop2";
        d[("rho_" + pop).c_str()] = to_numpy(tr.rho[s]);
        d[("m_mean_" + pop).c_str()] = to_numpy(tr.m_mean[s]);
        const std::size_t cells = tr.m[s].size();
        const std::size_t ns = tr.n_samples();
        py::array_t<double> m({cells, ns});
        auto mm = m.mutable_unchecked<2>();
        for (std::size_t c = 0; c < cells; ++c)
            for (std::size_t t = 0; t < ns; ++t)
                mm(static_cast<py::ssize_t>(c), static_cast<py::ssize_t>(t)) = tr.m[s][c][t];
        d[("m_" + pop).c_str()] = m;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic quorum-sensing channel simulator and information metrics";
    m.attr("__version__") = kVersion;

    m.def("default_config_json", [] { return config_to_json(default_config()).dump(2); },
          "Bundled baseline configuration as a JSON string");

    m.def("config_hash",
          [](const std::string& cfg) { return config_hash(config_from_pyjson(cfg)); },
          py::arg("config_json"));

    m.def("scenario_config_json",
          [](const std::string& base, const std::string& name) {
              return config_to_json(
                         make_scenario_config(config_from_pyjson(base), scenario_by_name(name)))
                  .dump(2);
          },
          py::arg("config_json"), py::arg("scenario"));

    m.def("simulate",
          [](const std::string& cfg_json) {
              return trajectory_to_dict(simulate(config_from_pyjson(cfg_json)));
          },
          py::arg("config_json"), "Integrate the SDE system; returns numpy series");

    m.def("run_replicates",
          [](const std::string& cfg_json, int n_reps, int n_threads) {
              const auto trajs = run_replicates(config_from_pyjson(cfg_json), n_reps, n_threads);
              py::list out;
              for (const auto& tr : trajs) out.append(trajectory_to_dict(tr));
              return out;
          },
          py::arg("config_json"), py::arg("n_reps"), py::arg("n_threads") = 1);

    m.def("ksg_mi",
          [](py::array_t<double> x, py::array_t<double> y, int k) {
              return ksg_mi(from_numpy(x), from_numpy(y), k);
          },
          py::arg("x"), py::arg("y"), py::arg("k") = 4,
          "kNN mutual information estimate in bits");

    m.def("binned_mi",
          [](py::array_t<double> x, py::array_t<double> y, int bins) {
              return binned_mi(from_numpy(x), from_numpy(y), bins);
          },
          py::arg("x"), py::arg("y"), py::arg("bins"));

    m.def("ksg_mi_with_ci",
          [](py::array_t<double> x, py::array_t<double> y, int k, int block_len, int n_boot,
             double alpha, std::uint64_t seed, int n_threads) {
              const MIEstimate e = ksg_mi_with_ci(from_numpy(x), from_numpy(y), k, block_len,
                                                  n_boot, alpha, seed, n_threads);
              py::dict d;
              d["bits"] = e.bits;
              d["ci_low"] = e.ci_low;
              d["ci_high"] = e.ci_high;
              d["k"] = e.k;
              d["n_samples"] = e.n_samples;
              d["block_len"] = e.block_len;
              return d;
          },
          py::arg("x"), py::arg("y"), py::arg("k") = 4, py::arg("block_len") = 0,
          py::arg("n_boot") = 200, py::arg("alpha") = 0.05, py::arg("seed") = 0,
          py::arg("n_threads") = 1);

    m.def("transfer_entropy",
          [](py::array_t<double> src, py::array_t<double> dst, int lag, int k) {
              const TransferEntropy te = transfer_entropy(from_numpy(src), from_numpy(dst), lag, k);
              return py::make_tuple(te.bits_raw, te.bits);
          },
          py::arg("src"), py::arg("dst"), py::arg("lag") = 1, py::arg("k") = 4,
          "Returns (bits_raw, bits_clamped)");

    m.def("noise_decomposition",
          [](const std::string& cfg_json, int n_reps, int species, double start_frac,
             double end_frac, int n_threads) {
              const auto reps =
                  run_replicates(config_from_pyjson(cfg_json), n_reps, n_threads);
              NoiseWindow w;
              w.start_frac = start_frac;
              w.end_frac = end_frac;
              const NoiseSplit ns = noise_decomposition(reps, species, w);
              py::dict d;
              d["intrinsic_frac"] = ns.intrinsic_frac;
              d["extrinsic_frac"] = ns.extrinsic_frac;
              d["intrinsic_var"] = ns.intrinsic_var;
              d["extrinsic_var"] = ns.extrinsic_var;
              return d;
          },
          py::arg("config_json"), py::arg("n_reps") = 5, py::arg("species") = 0,
          py::arg("start_frac") = 0.1, py::arg("end_frac") = 1.0, py::arg("n_threads") = 1);

    m.def("analyze",
          [](const std::string& cfg_json, const std::vector<std::string>& analyses, int n_reps,
             int n_threads) {
              AnalysisOptions opts;
              opts.n_reps = n_reps;
              opts.n_threads = n_threads;
              return analyze(config_from_pyjson(cfg_json),
                             std::set<std::string>(analyses.begin(), analyses.end()), opts)
                  .dump();
          },
          py::arg("config_json"), py::arg("analyses"), py::arg("n_reps") = 5,
          py::arg("n_threads") = 1, "Returns the results bundle as a JSON string");

    m.def("bode_sweep",
          [](const std::string& cfg_json, const std::vector<double>& freqs, double amplitude,
             int n_cycles, int n_replicates, int n_threads) {
              BodeOptions opts;
              opts.amplitude = amplitude;
              opts.n_cycles = n_cycles;
              opts.n_replicates = n_replicates;
              opts.n_threads = n_threads;
              const auto points = bode_sweep(config_from_pyjson(cfg_json), freqs, opts);
              py::list out;
              for (const auto& p : points) {
                  py::dict d;
                  d["freq_hz"] = p.freq_hz;
                  d["species"] = p.species;
                  d["gain"] = p.gain;
                  d["gain_db"] = p.gain_db;
                  d["phase_rad"] = p.phase_rad;
                  d["reliable"] = p.reliable;
                  d["input_amp"] = p.input_amp;
                  d["output_amp"] = p.output_amp;
                  out.append(d);
              }
              return out;
          },
          py::arg("config_json"), py::arg("freqs"), py::arg("amplitude") = 0.0,
          py::arg("n_cycles") = 5, py::arg("n_replicates") = 2, py::arg("n_threads") = 1);

    m.def("default_bode_freqs", &default_bode_freqs, py::arg("f_min") = 1e-3,
          py::arg("f_max") = 10.0, py::arg("points") = 20);

    m.def("elasticity",
          [](const std::string& cfg_json, const std::string& param, double epsilon, int n_reps,
             int n_threads) {
              ElasticityOptions opts;
              opts.n_reps = n_reps;
              opts.n_threads = n_threads;
              const ElasticityReport r =
                  elasticity(config_from_pyjson(cfg_json), param, epsilon, opts);
              py::dict d;
              d["param"] = r.param;
              d["epsilon"] = r.epsilon;
              d["I0"] = r.I0;
              d["I_plus"] = r.I_plus;
              d["I_minus"] = r.I_minus;
              d["S"] = r.S;
              return d;
          },
          py::arg("config_json"), py::arg("param"), py::arg("epsilon") = 0.2,
          py::arg("n_reps") = 3, py::arg("n_threads") = 1);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);
}
