// rtc: command-line front end of the retina codec.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rtc/bitstream.hpp"
#include "rtc/codec.hpp"
#include "rtc/error.hpp"
#include "rtc/metrics.hpp"

namespace fs = std::filesystem;
using namespace rtc;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kFormat = 4 };

struct CommonFlags {
  std::string config;
  double horizon_ms = 0.0;
  double t_star_ms = 0.0;
  std::uint64_t seed = 0;
  bool dither = false;
  int threads = 0;
  CLI::Option* horizon = nullptr;
  CLI::Option* t_star = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void attach(CLI::App* app, bool with_dither) {
    app->add_option("--config", config, "key=value parameter file");
    horizon = app->add_option("--horizon-ms", horizon_ms, "encoding horizon (ms)");
    t_star = app->add_option("--t-star-ms", t_star_ms, "dither design observation time (ms)");
    seed_opt = app->add_option("--seed", seed, "master dither seed");
    threads_opt = app->add_option("--threads", threads, "worker threads (0 = all cores)");
    if (with_dither) app->add_flag("--dither", dither, "add multiscale triangular dither");
  }

  void resolve(RetinaParams& params, CodecOptions& options) const {
    if (!config.empty()) load_config(config, params, options);
    if (horizon->count()) options.horizon_ms = horizon_ms;
    if (t_star->count()) options.t_star_ms = t_star_ms;
    if (seed_opt->count()) options.seed = seed;
    if (threads_opt->count()) options.threads = threads;
    if (dither) options.dither = true;
    params.validate();
  }
};

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SpikeStream load_stream(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse(bytes);
}

std::string ms_tag(double ms) {
  std::ostringstream s;
  s << ms;
  return s.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Retina-inspired scalable image codec"};
  app.require_subcommand(1);

  // encode
  auto* encode = app.add_subcommand("encode", "image (PGM) -> spike stream");
  std::string enc_in, enc_out;
  CommonFlags enc_flags;
  encode->add_option("input", enc_in, "input PGM")->required();
  encode->add_option("output", enc_out, "output stream")->required();
  enc_flags.attach(encode, true);

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "spike stream -> image (PGM) at one observation time");
  std::string dec_in, dec_out;
  double dec_t = 0.0;
  int dec_threads = 0;
  decode_cmd->add_option("input", dec_in, "input stream")->required();
  decode_cmd->add_option("output", dec_out, "output PGM")->required();
  decode_cmd->add_option("--t-obs-ms", dec_t, "observation time (ms)")->required();
  decode_cmd->add_option("--threads", dec_threads, "worker threads (0 = all cores)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "rate-quality sweep over observation times (CSV)");
  std::string sw_in, sw_out;
  std::vector<double> sw_times{20, 30, 40, 50, 60};
  int sw_trials = 1;
  CommonFlags sw_flags;
  sweep_cmd->add_option("input", sw_in, "input PGM")->required();
  sweep_cmd->add_option("output", sw_out, "output CSV")->required();
  sweep_cmd->add_option("--t-obs-ms", sw_times, "observation times (ms)")->delimiter(',');
  sweep_cmd->add_option("--trials", sw_trials, "dithered encodes averaged in the dithered columns");
  sw_flags.attach(sweep_cmd, true);

  // dither-report
  auto* report_cmd = app.add_subcommand("dither-report", "noiseless vs dithered reconstructions around t*");
  std::string rp_in, rp_dir;
  CommonFlags rp_flags;
  report_cmd->add_option("input", rp_in, "input PGM")->required();
  report_cmd->add_option("output_dir", rp_dir, "directory for the image pairs and CSV")->required();
  rp_flags.attach(report_cmd, false);

  // dump-luts
  auto* dump_cmd = app.add_subcommand("dump-luts", "write inner-layer and LIF tables as text");
  std::string dump_dir, dump_stream;
  double dump_t = 52.0;
  int dump_n = 256;
  CommonFlags dump_flags;
  dump_cmd->add_option("output_dir", dump_dir, "output directory")->required();
  dump_cmd->add_option("--stream", dump_stream, "take parameters and schedule from this stream");
  dump_cmd->add_option("--n", dump_n, "image side when no stream is given");
  dump_cmd->add_option("--t-obs-ms", dump_t, "observation time for the LIF tables (ms)");
  dump_flags.attach(dump_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*encode) {
    RetinaParams params;
    CodecOptions options;
    enc_flags.resolve(params, options);
    const auto image = read_pgm(enc_in);
    const auto result = encode_image(image, params, options);
    write_file_atomic(enc_out, serialize(result.stream));
    std::cerr << "encoded " << result.stream.events.size() << " events, gamma "
              << result.stream.header.params.gamma << " A/level";
    if (result.overflow) std::cerr << ", " << result.overflow << " clamped magnitudes";
    std::cerr << '\n';
  } else if (*decode_cmd) {
    const auto stream = load_stream(dec_in);
    Decoder decoder(stream.header, dec_threads);
    DecodeStats stats;
    const auto image = decoder.image(stream, to_microseconds(dec_t), &stats);
    write_pgm(dec_out, image);
    if (stats.saturated || stats.inner_clamped) {
      std::cerr << "warning: " << stats.saturated << " saturated counts, " << stats.inner_clamped
                << " clamped currents\n";
    }
  } else if (*sweep_cmd) {
    RetinaParams params;
    CodecOptions options;
    sw_flags.resolve(params, options);
    SweepOptions sweep;
    sweep.t_obs_ms = sw_times;
    sweep.rate_from_dithered = options.dither;
    sweep.dither_trials = sw_trials;
    const auto rows = run_sweep(read_pgm(sw_in), params, options, sweep);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text_atomic(sw_out, csv.str());
  } else if (*report_cmd) {
    RetinaParams params;
    CodecOptions options;
    rp_flags.resolve(params, options);
    const auto report = run_dither_report(read_pgm(rp_in), params, options);
    fs::create_directories(rp_dir);
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      const auto tag = ms_tag(report.rows[r].t_obs_ms);
      write_pgm(fs::path(rp_dir) / ("noiseless_" + tag + "ms.pgm"), report.noiseless[r]);
      write_pgm(fs::path(rp_dir) / ("dithered_" + tag + "ms.pgm"), report.dithered[r]);
    }
    std::ostringstream csv;
    write_dither_csv(csv, report);
    write_text_atomic(fs::path(rp_dir) / "dither_report.csv", csv.str());
  } else if (*dump_cmd) {
    StreamHeader header;
    if (!dump_stream.empty()) {
      header = load_stream(dump_stream).header;
    } else {
      RetinaParams params;
      CodecOptions options;
      dump_flags.resolve(params, options);
      const DoGBank bank(dump_n, params);
      header.n = dump_n;
      header.subbands = bank.subbands();
      header.params = params;
      header.schedule_us = codec_schedule(bank.subbands(), params).to_microseconds();
      header.horizon_us = to_microseconds(options.horizon_ms);
      if (header.horizon_us < header.schedule_us.back()) throw ConfigError("horizon precedes the last subband delay");
    }
    Decoder decoder(header, dump_flags.threads);
    const auto& tables = decoder.tables(to_microseconds(dump_t));
    fs::create_directories(dump_dir);
    for (std::size_t k = 0; k < tables.inner.size(); ++k) {
      std::ostringstream inner;
      tables.inner[k].write_text(inner);
      write_text_atomic(fs::path(dump_dir) / ("inner_" + std::to_string(k) + ".txt"), inner.str());
      if (k == 0 || tables.lif[k].table().size() == 0) continue;
      std::ostringstream lif;
      tables.lif[k].table().write_text(lif);
      write_text_atomic(fs::path(dump_dir) / ("lif_" + std::to_string(k) + ".txt"), lif.str());
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "stream format error: " << e.what() << '\n';
    return kFormat;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
