#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ssct/errors.hpp"
#include "ssct/io.hpp"
#include "ssct/pipeline.hpp"
#include "ssct/presets.hpp"
#include "ssct/synth.hpp"

namespace py = pybind11;
using namespace ssct;

namespace {

SpatialField field_from_array(const py::array_t<std::complex<double>>& arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
        throw DimensionError("expected a square 2D complex array");
    const auto L = static_cast<std::size_t>(arr.shape(0));
    SpatialField f(L);
    auto r = arr.unchecked<2>();
    for (std::size_t n1 = 0; n1 < L; ++n1)
        for (std::size_t n2 = 0; n2 < L; ++n2) f.at(n1, n2) = r(static_cast<py::ssize_t>(n1),
                                                               static_cast<py::ssize_t>(n2));
    return f;
}

py::array_t<std::complex<double>> array_from_field(const SpatialField& f) {
    py::array_t<std::complex<double>> arr({f.L, f.L});
    auto w = arr.mutable_unchecked<2>();
    for (std::size_t n1 = 0; n1 < f.L; ++n1)
        for (std::size_t n2 = 0; n2 < f.L; ++n2)
            w(static_cast<py::ssize_t>(n1), static_cast<py::ssize_t>(n2)) = f.at(n1, n2);
    return arr;
}

py::array_t<std::complex<double>> array_from_vector2(const VectorField2& v) {
    py::array_t<std::complex<double>> arr({v.side, v.side});
    auto w = arr.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.side; ++i)
        for (std::size_t j = 0; j < v.side; ++j) {
            const std::size_t idx = i * v.side + j;
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) =
                v.defined[idx] ? std::complex<double>(v.v1[idx], v.v2[idx])
                               : std::complex<double>(std::nan(""), std::nan(""));
        }
    return arr;
}

VectorField2 vector2_from_array(const py::array_t<std::complex<double>>& arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
        throw DimensionError("expected a square 2D complex array");
    const auto side = static_cast<std::size_t>(arr.shape(0));
    VectorField2 v(side);
    auto r = arr.unchecked<2>();
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            const auto z = r(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
            if (std::isnan(z.real()) || std::isnan(z.imag())) continue;
            const std::size_t idx = i * side + j;
            v.v1[idx] = z.real();
            v.v2[idx] = z.imag();
            v.defined[idx] = 1;
        }
    return v;
}

}  // namespace

PYBIND11_MODULE(_ssct, m) {
    m.doc() = "synchrosqueezed curvelet transform core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<TilingParams>(m, "TilingParams")
        .def(py::init<>())
        .def_readwrite("L", &TilingParams::L)
        .def_readwrite("s", &TilingParams::s)
        .def_readwrite("t", &TilingParams::t)
        .def_readwrite("a_min", &TilingParams::a_min)
        .def_readwrite("finest_cap", &TilingParams::finest_cap)
        .def_readwrite("radial_overlap", &TilingParams::radial_overlap)
        .def_readwrite("angular_overlap", &TilingParams::angular_overlap)
        .def_readwrite("real_mode", &TilingParams::real_mode);

    py::class_<Tiling, std::shared_ptr<Tiling>>(m, "Tiling")
        .def_property_readonly("tile_count", &Tiling::tile_count)
        .def_property_readonly("max_box_extent", &Tiling::max_box_extent)
        .def("window_square_sum", &Tiling::window_square_sum)
        .def("tile_info", [](const Tiling& t, std::size_t i) {
            const Tile& tile = t.tiles.at(i);
            return py::make_tuple(tile.a, tile.theta, tile.L_a, tile.support_size());
        });

    m.def("build_tiling",
          [](const TilingParams& params) { return std::make_shared<Tiling>(build_tiling(params)); });

    py::class_<CoefficientSet>(m, "CoefficientSet")
        .def_property_readonly("coeff_side", [](const CoefficientSet& c) { return c.L_B; })
        .def_property_readonly("has_gradient", [](const CoefficientSet& c) { return c.has_gradient; })
        .def_property_readonly("tile_count", [](const CoefficientSet& c) { return c.tiles.size(); })
        .def("tile", [](const CoefficientSet& c, std::size_t i) {
            const auto& w = c.tiles.at(i).w;
            py::array_t<std::complex<double>> arr({c.L_B, c.L_B});
            std::copy(w.begin(), w.end(), arr.mutable_data());
            return arr;
        });

    m.def(
        "dft2", [](const py::array_t<std::complex<double>>& f) {
            const SpectrumField g = dft2(field_from_array(f));
            py::array_t<std::complex<double>> arr({g.L, g.L});
            std::copy(g.values.begin(), g.values.end(), arr.mutable_data());
            return arr;
        },
        "isometric centered 2D DFT");
    m.def("idft2", [](const py::array_t<std::complex<double>>& g) {
        SpectrumField s(static_cast<std::size_t>(g.shape(0)));
        if (g.ndim() != 2 || g.shape(0) != g.shape(1))
            throw DimensionError("expected a square 2D complex array");
        std::copy(g.data(), g.data() + s.values.size(), s.values.begin());
        return array_from_field(idft2(s));
    });
    m.def(
        "periodize",
        [](const py::array_t<std::complex<double>>& f, double margin) {
            return array_from_field(periodize(field_from_array(f), margin));
        },
        py::arg("field"), py::arg("margin"));

    m.def(
        "forward",
        [](const py::array_t<std::complex<double>>& f, std::shared_ptr<Tiling> tiling,
           std::size_t coeff_side, unsigned threads) {
            return forward(field_from_array(f), std::move(tiling), coeff_side, threads);
        },
        py::arg("field"), py::arg("tiling"), py::arg("coeff_side") = 0, py::arg("threads") = 1);
    m.def(
        "gradient",
        [](const py::array_t<std::complex<double>>& f, std::shared_ptr<Tiling> tiling,
           std::size_t coeff_side, unsigned threads) {
            return gradient(field_from_array(f), std::move(tiling), coeff_side, threads);
        },
        py::arg("field"), py::arg("tiling"), py::arg("coeff_side") = 0, py::arg("threads") = 1);
    m.def(
        "transpose",
        [](const CoefficientSet& coeffs, unsigned threads) {
            return array_from_field(transpose(coeffs, nullptr, threads));
        },
        py::arg("coeffs"), py::arg("threads") = 1);
    m.def("frame_energy", &frame_energy);

    py::class_<AdjacencyParams>(m, "AdjacencyParams")
        .def(py::init<>())
        .def_readwrite("d0", &AdjacencyParams::d0)
        .def_readwrite("theta0", &AdjacencyParams::theta0)
        .def_readwrite("R0", &AdjacencyParams::R0);

    py::class_<DecomposeConfig>(m, "DecomposeConfig")
        .def(py::init<>())
        .def_readwrite("tiling", &DecomposeConfig::tiling)
        .def_readwrite("coeff_side", &DecomposeConfig::coeff_side)
        .def_readwrite("epsilon", &DecomposeConfig::epsilon)
        .def_readwrite("cell_step", &DecomposeConfig::cell_step)
        .def_readwrite("delta", &DecomposeConfig::delta)
        .def_readwrite("adjacency", &DecomposeConfig::adjacency)
        .def_readwrite("max_modes", &DecomposeConfig::max_modes)
        .def_readwrite("threads", &DecomposeConfig::threads);

    m.def(
        "decompose",
        [](const py::array_t<std::complex<double>>& f, const DecomposeConfig& cfg) {
            const ModeSet ms = decompose(field_from_array(f), cfg);
            py::list modes;
            for (const SpatialField& mode : ms.modes) modes.append(array_from_field(mode));
            py::dict out;
            out["modes"] = modes;
            out["residual"] = array_from_field(ms.residual);
            out["residual_lowpass"] = array_from_field(ms.residual_lowpass);
            out["mode_energies"] = ms.mode_energies;
            out["discarded_energy"] = ms.discarded_energy;
            out["coefficient_energy"] = ms.total_coefficient_energy;
            out["coeff_side"] = ms.coeff_side;
            out["tile_count"] = ms.tile_count;
            out["warning_empty"] = ms.warning_empty;
            return out;
        },
        py::arg("field"), py::arg("config"));

    m.def(
        "estimate_field",
        [](const py::array_t<std::complex<double>>& f, const DecomposeConfig& cfg,
           py::object truth) {
            std::optional<VectorField2> t;
            if (!truth.is_none()) t = vector2_from_array(truth.cast<py::array_t<std::complex<double>>>());
            const EstimateResult res = estimate_field(field_from_array(f), cfg, t ? &*t : nullptr);
            py::dict out;
            out["mean_wavevector"] = array_from_vector2(res.mean_vectors);
            out["coeff_side"] = res.coeff_side;
            out["tile_count"] = res.tile_count;
            out["thresholded_energy"] = res.thresholded_energy;
            if (res.error) {
                out["max_R"] = res.error->max_r;
                out["mean_R"] = res.error->mean_r;
            }
            return out;
        },
        py::arg("field"), py::arg("config"), py::arg("truth") = py::none());

    py::class_<PhaseSpec>(m, "PhaseSpec")
        .def(py::init<>())
        .def_readwrite("slope1", &PhaseSpec::slope1)
        .def_readwrite("slope2", &PhaseSpec::slope2)
        .def_readwrite("amp1", &PhaseSpec::amp1)
        .def_readwrite("amp2", &PhaseSpec::amp2)
        .def_readwrite("flip1", &PhaseSpec::flip1)
        .def_readwrite("flip2", &PhaseSpec::flip2)
        .def_readwrite("offset", &PhaseSpec::offset)
        .def_readwrite("wavenumber", &PhaseSpec::wavenumber)
        .def_readwrite("amplitude", &PhaseSpec::amplitude)
        .def("phi", &PhaseSpec::phi)
        .def("grad_phi", &PhaseSpec::grad_phi);

    py::class_<BandSpec>(m, "BandSpec")
        .def(py::init<>())
        .def_readwrite("center", &BandSpec::center)
        .def_readwrite("sigma", &BandSpec::sigma)
        .def("envelope", &BandSpec::envelope);

    m.def("deformed_plane_wave", [](const PhaseSpec& spec, std::size_t L) {
        return array_from_field(deformed_plane_wave(spec, L));
    });
    m.def("banded_imf", [](const PhaseSpec& spec, const BandSpec& band, std::size_t L) {
        return array_from_field(banded_imf(spec, band, L));
    });
    m.def("exact_wavevectors", [](const PhaseSpec& spec, std::size_t side) {
        return array_from_vector2(exact_wavevectors(spec, side));
    });
    m.def(
        "add_noise",
        [](const py::array_t<std::complex<double>>& f, double snr_db, std::uint64_t seed,
           bool real_noise) {
            return array_from_field(add_noise(field_from_array(f), snr_db, seed, real_noise));
        },
        py::arg("field"), py::arg("snr_db"), py::arg("seed"), py::arg("real_noise") = false);
    m.def("random_shift_disrupt",
          [](const py::array_t<std::complex<double>>& f, std::uint64_t seed, std::size_t max_shift) {
              return array_from_field(random_shift_disrupt(field_from_array(f), seed, max_shift));
          });

    m.def("read_field",
          [](const std::string& path) { return array_from_field(read_field(path)); });
    m.def("write_field", [](const py::array_t<std::complex<double>>& f, const std::string& path) {
        write_field(field_from_array(f), path);
    });

    m.def("preset_names", &preset_names);
    m.def("preset_config", [](const std::string& name) {
        const RunConfig cfg = preset(name);
        py::dict out;
        out["name"] = cfg.name;
        out["L"] = cfg.L;
        out["seed"] = cfg.seed;
        DecomposeConfig dc = cfg.decompose;
        dc.tiling.L = cfg.L;
        out["decompose"] = dc;
        return out;
    });
    m.def("preset_field", [](const std::string& name) {
        const RunConfig cfg = preset(name);
        return array_from_field(generate(cfg.generator, cfg.L, cfg.seed));
    });
}
