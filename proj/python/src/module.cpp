#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "rtc/bitstream.hpp"
#include "rtc/codec.hpp"
#include "rtc/error.hpp"
#include "rtc/metrics.hpp"

namespace py = pybind11;
using namespace rtc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImagePlane to_plane(const Array& a) {
  if (a.ndim() != 2) throw ConfigError("expected a 2-D array");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return ImagePlane(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ImagePlane& img) {
  Array out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

std::span<const std::uint8_t> as_bytes(const py::bytes& b) {
  const std::string_view v = b;
  return {reinterpret_cast<const std::uint8_t*>(v.data()), v.size()};
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

class StreamDecoder {
 public:
  StreamDecoder(const py::bytes& data, int threads)
      : stream_(parse(as_bytes(data))), decoder_(std::make_unique<Decoder>(stream_.header, threads)) {}

  Array image(double t_obs_ms) {
    const auto t = to_microseconds(t_obs_ms);
    ImagePlane img;
    {
      py::gil_scoped_release release;
      img = decoder_->image(stream_, t);
    }
    return to_array(img);
  }

  double bpp(double t_obs_ms) const { return entropy_bpp(stream_, to_microseconds(t_obs_ms)); }

  std::vector<std::uint32_t> counts(double t_obs_ms) const { return spike_counts(stream_, to_microseconds(t_obs_ms)); }

  std::size_t events() const { return stream_.events.size(); }
  int size() const { return stream_.header.n; }
  bool dithered() const { return stream_.header.dithered; }
  std::vector<std::uint32_t> schedule_us() const { return stream_.header.schedule_us; }

 private:
  SpikeStream stream_;
  std::unique_ptr<Decoder> decoder_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Retina-inspired scalable image codec";

  auto base = py::register_exception<Error>(m, "CodecError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def(
      "encode",
      [](const Array& image, bool dither, double t_star_ms, std::uint64_t seed, double horizon_ms, int threads) {
        CodecOptions o;
        o.dither = dither;
        o.t_star_ms = t_star_ms;
        o.seed = seed;
        o.horizon_ms = horizon_ms;
        o.threads = threads;
        const auto plane = to_plane(image);
        std::vector<std::uint8_t> bytes;
        {
          py::gil_scoped_release release;
          bytes = serialize(encode_image(plane, RetinaParams{}, o).stream);
        }
        return to_bytes(bytes);
      },
      py::arg("image"), py::arg("dither") = false, py::arg("t_star_ms") = 52.0, py::arg("seed") = 1,
      py::arg("horizon_ms") = 100.0, py::arg("threads") = 0,
      "Encode a square power-of-two grayscale image (values in [0, 255]) into a spike stream.");

  m.def(
      "truncate",
      [](const py::bytes& data, std::size_t records) { return to_bytes(truncate_records(as_bytes(data), records)); },
      py::arg("stream"), py::arg("records"), "Keep the header and the first `records` event records.");

  py::class_<StreamDecoder>(m, "Decoder")
      .def(py::init<const py::bytes&, int>(), py::arg("stream"), py::arg("threads") = 0)
      .def("image", &StreamDecoder::image, py::arg("t_obs_ms"), "Reconstruction in pixel units (unclamped).")
      .def("bpp", &StreamDecoder::bpp, py::arg("t_obs_ms"))
      .def("counts", &StreamDecoder::counts, py::arg("t_obs_ms"))
      .def_property_readonly("events", &StreamDecoder::events)
      .def_property_readonly("size", &StreamDecoder::size)
      .def_property_readonly("dithered", &StreamDecoder::dithered)
      .def_property_readonly("schedule_us", &StreamDecoder::schedule_us);

  m.def("psnr", [](const Array& a, const Array& b) { return psnr(to_plane(a), to_plane(b)); });
  m.def("mean_ssim", [](const Array& a, const Array& b) { return mean_ssim(to_plane(a), to_plane(b)); });
  m.def("to_8bit", [](const Array& a) { return to_array(as_8bit(to_plane(a))); });
  m.def("read_pgm", [](const std::string& path) { return to_array(read_pgm(path)); });
  m.def("write_pgm", [](const std::string& path, const Array& a) { write_pgm(path, to_plane(a)); });
  m.def(
      "spike_times",
      [](double current, double duration) { return lif_spike_times(current, duration, RetinaParams{}); },
      py::arg("current"), py::arg("duration"), "Spike times (s) of one LIF neuron under a constant current (A).");
  m.def(
      "schedule_us", [](int subbands) { return codec_schedule(subbands, RetinaParams{}).to_microseconds(); },
      py::arg("subbands"));
}
