#include "rtc/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string_view>

#include "rtc/error.hpp"

namespace rtc {
namespace {

struct Field {
  std::string_view key;
  double RetinaParams::*member;
};

constexpr Field kFields[] = {
    {"g0_b", &RetinaParams::g0_b},
    {"tau_b", &RetinaParams::tau_b},
    {"lambda_b", &RetinaParams::lambda_b},
    {"c_b", &RetinaParams::c_b},
    {"v0_g", &RetinaParams::v0_g},
    {"i0_g", &RetinaParams::i0_g},
    {"w_g", &RetinaParams::w_g},
    {"tau_g", &RetinaParams::tau_g},
    {"lambda_g", &RetinaParams::lambda_g},
    {"delta", &RetinaParams::delta},
    {"g_l", &RetinaParams::g_l},
    {"c_l", &RetinaParams::c_l},
    {"v_reset", &RetinaParams::v_reset},
    {"sigma_anchor", &RetinaParams::sigma_anchor},
    {"sigma_ratio", &RetinaParams::sigma_ratio},
    {"gamma", &RetinaParams::gamma},
    // not part of the bitstream block
    {"t_first", &RetinaParams::t_first},
    {"t_last", &RetinaParams::t_last},
    {"tau_opl", &RetinaParams::tau_opl},
};

constexpr std::size_t kBlockFields = 16;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  }
}

}  // namespace

void RetinaParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be finite and strictly positive");
    }
  };
  positive(g0_b, "g0_b");
  positive(tau_b, "tau_b");
  positive(lambda_b, "lambda_b");
  positive(c_b, "c_b");
  positive(i0_g, "i0_g");
  positive(tau_g, "tau_g");
  positive(lambda_g, "lambda_g");
  positive(delta, "delta");
  positive(g_l, "g_l");
  positive(c_l, "c_l");
  positive(tau_opl, "tau_opl");
  positive(t_first, "t_first");
  positive(sigma_anchor, "sigma_anchor");
  positive(gamma, "gamma");
  if (!(w_g > 0.0 && w_g <= 1.0)) throw ConfigError("w_g must lie in (0, 1]");
  if (!(sigma_ratio > 1.0)) throw ConfigError("sigma_ratio must exceed 1 (surround wider than center)");
  if (!(t_last > t_first)) throw ConfigError("t_last must exceed t_first");
  if (!std::isfinite(v0_g) || !std::isfinite(v_reset)) throw ConfigError("non-finite potential");
  if (!(v_reset < delta)) throw ConfigError("v_reset must lie below the firing threshold delta");
}

std::array<double, 16> RetinaParams::to_block() const {
  std::array<double, 16> block{};
  for (std::size_t i = 0; i < kBlockFields; ++i) block[i] = this->*kFields[i].member;
  return block;
}

RetinaParams RetinaParams::from_block(const std::array<double, 16>& block) {
  RetinaParams p;
  for (std::size_t i = 0; i < kBlockFields; ++i) p.*kFields[i].member = block[i];
  return p;
}

std::uint64_t RetinaParams::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : to_block()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

bool RetinaParams::set(const std::string& key, double value) {
  for (const auto& f : kFields) {
    if (f.key == key) {
      this->*f.member = value;
      return true;
    }
  }
  return false;
}

void apply_config(const std::map<std::string, std::string>& entries, RetinaParams& params,
                  CodecOptions& options) {
  for (const auto& [key, text] : entries) {
    if (key == "dither") {
      if (text == "1" || text == "true" || text == "on") {
        options.dither = true;
      } else if (text == "0" || text == "false" || text == "off") {
        options.dither = false;
      } else {
        throw ConfigError("config key 'dither': expected true/false");
      }
    } else if (key == "seed") {
      try {
        options.seed = std::stoull(text);
      } catch (const std::exception&) {
        throw ConfigError("config key 'seed': not an unsigned integer");
      }
    } else if (key == "threads") {
      options.threads = static_cast<int>(parse_double(key, text));
    } else if (key == "horizon_ms") {
      options.horizon_ms = parse_double(key, text);
    } else if (key == "t_star_ms") {
      options.t_star_ms = parse_double(key, text);
    } else if (!params.set(key, parse_double(key, text))) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void load_config(const std::filesystem::path& path, RetinaParams& params, CodecOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  apply_config(entries, params, options);
}

}  // namespace rtc
