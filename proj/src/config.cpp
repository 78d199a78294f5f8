#include "mbeseg/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mbeseg {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::string value;
  int line = 0;
};

// section.key -> (value, line); insertion errors name duplicates
class KeyTable {
public:
  KeyTable(std::string name) : name_(std::move(name)) {}

  void insert(const std::string& section, const std::string& key,
              const std::string& value, int line) {
    const std::string full = section + "." + key;
    if (map_.count(full))
      fail(ErrorKind::config,
           name_ + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    map_[full] = {value, line};
  }

  const Entry* find(const std::string& full) const {
    auto it = map_.find(full);
    return it == map_.end() ? nullptr : &it->second;
  }

  bool has(const std::string& full) const { return map_.count(full) != 0; }

  void mark_used(const std::string& full) { used_.insert(full); }

  void check_all_used() const {
    for (const auto& [full, e] : map_)
      if (!used_.count(full))
        fail(ErrorKind::config, name_ + ":" + std::to_string(e.line) +
                                    ": unknown key '" + full + "'");
  }

  const std::string& name() const { return name_; }

private:
  std::string name_;
  std::map<std::string, Entry> map_;
  std::set<std::string> used_;
};

[[noreturn]] void bad_value(const KeyTable& t, const std::string& full,
                            const Entry& e, const std::string& expect) {
  fail(ErrorKind::config, t.name() + ":" + std::to_string(e.line) + ": key '" +
                              full + "' expects " + expect + ", got '" +
                              e.value + "'");
}

class Reader {
public:
  Reader(KeyTable& t, std::string section) : t_(t), section_(std::move(section)) {}

  bool present(const std::string& key) const {
    return t_.has(section_ + "." + key);
  }

  std::string str(const std::string& key, const std::string& dflt) {
    const Entry* e = get(key);
    return e ? e->value : dflt;
  }

  double num(const std::string& key, double dflt) {
    const Entry* e = get(key);
    if (!e) return dflt;
    const char* s = e->value.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != '\0') bad_value(t_, full(key), *e, "a number");
    return x;
  }

  int integer(const std::string& key, int dflt) {
    const Entry* e = get(key);
    if (!e) return dflt;
    const char* s = e->value.c_str();
    char* end = nullptr;
    const long x = std::strtol(s, &end, 10);
    if (end == s || *end != '\0') bad_value(t_, full(key), *e, "an integer");
    return static_cast<int>(x);
  }

  std::uint64_t u64(const std::string& key, std::uint64_t dflt) {
    const Entry* e = get(key);
    if (!e) return dflt;
    const char* s = e->value.c_str();
    char* end = nullptr;
    const unsigned long long x = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
      bad_value(t_, full(key), *e, "a nonnegative integer");
    return x;
  }

  bool boolean(const std::string& key, bool dflt) {
    const Entry* e = get(key);
    if (!e) return dflt;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    bad_value(t_, full(key), *e, "true or false");
  }

  // value must be one of the listed tokens; returns its index
  int choice(const std::string& key, const std::vector<std::string>& tokens,
             int dflt) {
    const Entry* e = get(key);
    if (!e) return dflt;
    for (std::size_t k = 0; k < tokens.size(); ++k)
      if (e->value == tokens[k]) return static_cast<int>(k);
    std::string expect = "one of {";
    for (std::size_t k = 0; k < tokens.size(); ++k)
      expect += (k ? ", " : "") + tokens[k];
    expect += "}";
    bad_value(t_, full(key), *e, expect);
  }

  [[noreturn]] void require(const std::string& key, const std::string& why) {
    fail(ErrorKind::config,
         t_.name() + ": missing required key '" + full(key) + "' (" + why + ")");
  }

  int line_of(const std::string& key) const {
    const Entry* e = t_.find(full(key));
    return e ? e->line : 0;
  }

private:
  std::string full(const std::string& key) const { return section_ + "." + key; }
  const Entry* get(const std::string& key) {
    const std::string f = full(key);
    t_.mark_used(f);
    return t_.find(f);
  }
  KeyTable& t_;
  std::string section_;
};

KeyTable tokenize(const std::string& text, const std::string& name) {
  KeyTable table(name);
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const std::size_t cut = s.find_first_of(";#");
    if (cut != std::string::npos) s = s.substr(0, cut);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(ErrorKind::config,
             name + ":" + std::to_string(line) + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "input" && section != "init" && section != "model" &&
          section != "output")
        fail(ErrorKind::config, name + ":" + std::to_string(line) +
                                    ": unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::config,
           name + ":" + std::to_string(line) + ": expected key = value");
    if (section.empty())
      fail(ErrorKind::config,
           name + ":" + std::to_string(line) + ": key outside any section");
    table.insert(section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
  }
  return table;
}

void check_path_exists(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path))
    fail(ErrorKind::io, what + " does not exist: " + path);
}

FixtureSpec read_fixture(Reader& in, KeyTable& table) {
  FixtureSpec fx;
  fx.kind = static_cast<FixtureSpec::Kind>(in.choice(
      "fixture", {"two_shapes", "ring", "star_corners", "blurred_boundary"},
      static_cast<int>(FixtureSpec::Kind::ring)));
  fx.width = in.integer("width", 128);
  fx.height = in.integer("height", 128);
  fx.foreground = in.num("foreground", 170.0);
  fx.background = in.num("background", 85.0);
  fx.inner_radius = in.num("inner_radius", 24.0);
  fx.outer_radius = in.num("outer_radius", 44.0);
  fx.blur_sigma = in.num("blur_sigma", 3.0);
  fx.bias = static_cast<FixtureSpec::Bias>(
      in.choice("bias", {"none", "linear", "radial_gaussian"},
                static_cast<int>(FixtureSpec::Bias::none)));
  fx.bias_gain = in.num("bias_gain", 0.3);
  fx.bias_amplitude = in.num("bias_amplitude", 0.3);
  fx.bias_sigma = in.num("bias_sigma", 0.0);
  fx.noise_std = in.num("noise_std", 0.0);
  fx.seed = in.u64("seed", 0);
  (void)table;
  return fx;
}

} // namespace

const std::set<std::string>& valid_emit_tokens() {
  static const std::set<std::string> tokens = {"mask", "contour_overlay",
                                               "gradmap", "trace", "final_phi"};
  return tokens;
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  KeyTable table = tokenize(text, name);
  RunConfig cfg;

  // ---- input ----
  {
    Reader in(table, "input");
    const bool has_source = in.present("source");
    const bool has_image = in.present("image");
    const bool has_fixture = in.present("fixture");
    int src;
    if (has_source) {
      src = in.choice("source", {"fixture", "image"}, 0);
    } else if (has_image == has_fixture) {
      fail(ErrorKind::config,
           name + ": [input] needs 'source', or exactly one of 'image'/'fixture'");
    } else {
      src = has_image ? 1 : 0;
    }
    cfg.source = src == 1 ? RunConfig::Source::image : RunConfig::Source::fixture;
    cfg.image_path = in.str("image", "");
    cfg.fixture = read_fixture(in, table);
    if (cfg.source == RunConfig::Source::image) {
      if (cfg.image_path.empty()) in.require("image", "source is image");
      check_path_exists(cfg.image_path, "input image");
    }
  }

  // ---- init ----
  {
    Reader in(table, "init");
    if (!in.present("shape")) in.require("shape", "no default shape");
    const int shape = in.choice("shape", {"rectangle", "disk", "mask"}, 0);
    cfg.init.shape = static_cast<InitSpec::Shape>(shape);
    cfg.init.mode = static_cast<InitSpec::Mode>(
        in.choice("mode", {"binary_step", "signed_distance"}, 0));
    cfg.init.step = in.num("step", 2.0);
    switch (cfg.init.shape) {
      case InitSpec::Shape::disk:
        if (!in.present("cx")) in.require("cx", "disk geometry");
        if (!in.present("cy")) in.require("cy", "disk geometry");
        if (!in.present("radius")) in.require("radius", "disk geometry");
        cfg.init.cx = in.num("cx", 0);
        cfg.init.cy = in.num("cy", 0);
        cfg.init.radius = in.num("radius", 0);
        break;
      case InitSpec::Shape::rectangle:
        if (!in.present("x0")) in.require("x0", "rectangle geometry");
        if (!in.present("y0")) in.require("y0", "rectangle geometry");
        if (!in.present("x1")) in.require("x1", "rectangle geometry");
        if (!in.present("y1")) in.require("y1", "rectangle geometry");
        cfg.init.x0 = in.num("x0", 0);
        cfg.init.y0 = in.num("y0", 0);
        cfg.init.x1 = in.num("x1", 0);
        cfg.init.y1 = in.num("y1", 0);
        break;
      case InitSpec::Shape::mask:
        if (!in.present("mask")) in.require("mask", "mask geometry");
        cfg.init.mask_path = in.str("mask", "");
        check_path_exists(cfg.init.mask_path, "init mask");
        break;
    }
  }

  // ---- model ----
  {
    Reader in(table, "model");
    cfg.model.fidelity.kind = static_cast<FidelitySpec::Kind>(
        in.choice("fidelity", {"gac", "rsf"},
                  static_cast<int>(FidelitySpec::Kind::rsf)));
    cfg.model.regularizer.kind = static_cast<RegularizerSpec::Kind>(
        in.choice("regularizer", {"mbe", "dr1", "dr2"},
                  static_cast<int>(RegularizerSpec::Kind::mbe)));
    const bool is_mbe =
        cfg.model.regularizer.kind == RegularizerSpec::Kind::mbe;
    cfg.model.scheme = static_cast<Scheme>(in.choice(
        "scheme", {"sav", "fdm"},
        is_mbe ? static_cast<int>(Scheme::sav) : static_cast<int>(Scheme::fdm)));
    cfg.model.regularizer.mu = in.num("mu", 1.0);
    cfg.model.regularizer.alpha = in.num("alpha", 10.0);
    cfg.model.fidelity.lambda1 = in.num("lambda1", 1.0);
    cfg.model.fidelity.lambda2 = in.num("lambda2", 1.0);
    cfg.model.fidelity.sigma = in.num("sigma", 3.0);
    cfg.model.fidelity.nu = in.num("nu", 0.0);
    cfg.model.fidelity.lambda = in.num("lambda", 5.0);
    cfg.model.fidelity.gamma = in.num("gamma", 1.0);
    cfg.model.fidelity.sigma_edge = in.num("sigma_edge", 1.5);
    cfg.model.dirac.kind = static_cast<DiracSpec::Kind>(
        in.choice("dirac", {"compact", "rational"},
                  static_cast<int>(DiracSpec::Kind::rational)));
    cfg.model.dirac.epsilon = in.num("epsilon", 1.0);
    cfg.model.tau = in.num("tau", 0.01);
    cfg.model.iter_max = in.integer("iter", 1000);
    cfg.model.tol = in.num("tol", 0.0);
    cfg.model.c0 = in.num("c0", 1.0);
  }

  // ---- output ----
  {
    Reader in(table, "output");
    cfg.out_dir = in.str("dir", "out");
    const std::string emit =
        in.str("emit", "mask,contour_overlay,gradmap,trace,final_phi");
    cfg.emit.clear();
    std::size_t pos = 0;
    while (pos <= emit.size()) {
      std::size_t comma = emit.find(',', pos);
      if (comma == std::string::npos) comma = emit.size();
      const std::string tok = trim(emit.substr(pos, comma - pos));
      pos = comma + 1;
      if (tok.empty()) continue;
      if (!valid_emit_tokens().count(tok)) {
        std::string valid;
        for (const std::string& t : valid_emit_tokens())
          valid += (valid.empty() ? "" : ", ") + t;
        fail(ErrorKind::config, name + ":" + std::to_string(in.line_of("emit")) +
                                    ": unknown emit token '" + tok +
                                    "' (valid: " + valid + ")");
      }
      cfg.emit.insert(tok);
    }
    if (cfg.emit.empty())
      fail(ErrorKind::config, name + ": emit list is empty");
    cfg.quiet = in.boolean("quiet", false);
  }

  table.check_all_used();
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::io, "cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[input]\n";
  os << "source = "
     << (cfg.source == RunConfig::Source::image ? "image" : "fixture") << "\n";
  if (cfg.source == RunConfig::Source::image)
    os << "image = " << cfg.image_path << "\n";
  const FixtureSpec& fx = cfg.fixture;
  static const char* kind_names[] = {"two_shapes", "ring", "star_corners",
                                     "blurred_boundary"};
  static const char* bias_names[] = {"none", "linear", "radial_gaussian"};
  os << "fixture = " << kind_names[static_cast<int>(fx.kind)] << "\n";
  os << "width = " << fx.width << "\n";
  os << "height = " << fx.height << "\n";
  os << "foreground = " << fmt_double(fx.foreground) << "\n";
  os << "background = " << fmt_double(fx.background) << "\n";
  os << "inner_radius = " << fmt_double(fx.inner_radius) << "\n";
  os << "outer_radius = " << fmt_double(fx.outer_radius) << "\n";
  os << "blur_sigma = " << fmt_double(fx.blur_sigma) << "\n";
  os << "bias = " << bias_names[static_cast<int>(fx.bias)] << "\n";
  os << "bias_gain = " << fmt_double(fx.bias_gain) << "\n";
  os << "bias_amplitude = " << fmt_double(fx.bias_amplitude) << "\n";
  os << "bias_sigma = " << fmt_double(fx.bias_sigma) << "\n";
  os << "noise_std = " << fmt_double(fx.noise_std) << "\n";
  os << "seed = " << fx.seed << "\n";

  os << "\n[init]\n";
  static const char* shape_names[] = {"rectangle", "disk", "mask"};
  static const char* mode_names[] = {"binary_step", "signed_distance"};
  os << "shape = " << shape_names[static_cast<int>(cfg.init.shape)] << "\n";
  os << "mode = " << mode_names[static_cast<int>(cfg.init.mode)] << "\n";
  switch (cfg.init.shape) {
    case InitSpec::Shape::disk:
      os << "cx = " << fmt_double(cfg.init.cx) << "\n";
      os << "cy = " << fmt_double(cfg.init.cy) << "\n";
      os << "radius = " << fmt_double(cfg.init.radius) << "\n";
      break;
    case InitSpec::Shape::rectangle:
      os << "x0 = " << fmt_double(cfg.init.x0) << "\n";
      os << "y0 = " << fmt_double(cfg.init.y0) << "\n";
      os << "x1 = " << fmt_double(cfg.init.x1) << "\n";
      os << "y1 = " << fmt_double(cfg.init.y1) << "\n";
      break;
    case InitSpec::Shape::mask:
      os << "mask = " << cfg.init.mask_path << "\n";
      break;
  }
  os << "step = " << fmt_double(cfg.init.step) << "\n";

  os << "\n[model]\n";
  os << "fidelity = "
     << (cfg.model.fidelity.kind == FidelitySpec::Kind::gac ? "gac" : "rsf")
     << "\n";
  static const char* reg_names[] = {"mbe", "dr1", "dr2"};
  os << "regularizer = " << reg_names[static_cast<int>(cfg.model.regularizer.kind)]
     << "\n";
  os << "scheme = " << (cfg.model.scheme == Scheme::sav ? "sav" : "fdm") << "\n";
  os << "mu = " << fmt_double(cfg.model.regularizer.mu) << "\n";
  os << "alpha = " << fmt_double(cfg.model.regularizer.alpha) << "\n";
  os << "lambda1 = " << fmt_double(cfg.model.fidelity.lambda1) << "\n";
  os << "lambda2 = " << fmt_double(cfg.model.fidelity.lambda2) << "\n";
  os << "sigma = " << fmt_double(cfg.model.fidelity.sigma) << "\n";
  os << "nu = " << fmt_double(cfg.model.fidelity.nu) << "\n";
  os << "lambda = " << fmt_double(cfg.model.fidelity.lambda) << "\n";
  os << "gamma = " << fmt_double(cfg.model.fidelity.gamma) << "\n";
  os << "sigma_edge = " << fmt_double(cfg.model.fidelity.sigma_edge) << "\n";
  os << "dirac = "
     << (cfg.model.dirac.kind == DiracSpec::Kind::compact ? "compact" : "rational")
     << "\n";
  os << "epsilon = " << fmt_double(cfg.model.dirac.epsilon) << "\n";
  os << "tau = " << fmt_double(cfg.model.tau) << "\n";
  os << "iter = " << cfg.model.iter_max << "\n";
  os << "tol = " << fmt_double(cfg.model.tol) << "\n";
  os << "c0 = " << fmt_double(cfg.model.c0) << "\n";

  os << "\n[output]\n";
  os << "dir = " << cfg.out_dir << "\n";
  std::string emit;
  for (const std::string& t : cfg.emit) emit += (emit.empty() ? "" : ",") + t;
  os << "emit = " << emit << "\n";
  os << "quiet = " << (cfg.quiet ? "true" : "false") << "\n";
  return os.str();
}

// ---------- fixture spec grammar ----------

FixtureSpec parse_fixture_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    parts.push_back(trim(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (parts.empty() || parts[0].empty())
    fail(ErrorKind::config, "fixture spec: missing kind");

  // reuse the config machinery: synthesize an [input] section
  std::string ini = "[input]\nfixture = " + parts[0] + "\n";
  for (std::size_t k = 1; k < parts.size(); ++k) {
    if (parts[k].empty()) continue;
    if (parts[k].find('=') == std::string::npos)
      fail(ErrorKind::config, "fixture spec: expected key=value, got '" +
                                  parts[k] + "'");
    ini += parts[k] + "\n";
  }
  ini += "[init]\nshape = disk\ncx = 1\ncy = 1\nradius = 1\n";
  RunConfig cfg = parse_config_text(ini, "fixture spec");
  return cfg.fixture;
}

std::string dump_fixture_spec(const FixtureSpec& fx) {
  static const char* kind_names[] = {"two_shapes", "ring", "star_corners",
                                     "blurred_boundary"};
  static const char* bias_names[] = {"none", "linear", "radial_gaussian"};
  std::ostringstream os;
  os << kind_names[static_cast<int>(fx.kind)];
  os << ",width=" << fx.width << ",height=" << fx.height;
  os << ",foreground=" << fmt_double(fx.foreground)
     << ",background=" << fmt_double(fx.background);
  if (fx.kind == FixtureSpec::Kind::ring)
    os << ",inner_radius=" << fmt_double(fx.inner_radius)
       << ",outer_radius=" << fmt_double(fx.outer_radius);
  if (fx.kind == FixtureSpec::Kind::blurred_boundary)
    os << ",blur_sigma=" << fmt_double(fx.blur_sigma);
  os << ",bias=" << bias_names[static_cast<int>(fx.bias)];
  if (fx.bias == FixtureSpec::Bias::linear)
    os << ",bias_gain=" << fmt_double(fx.bias_gain);
  if (fx.bias == FixtureSpec::Bias::radial_gaussian)
    os << ",bias_amplitude=" << fmt_double(fx.bias_amplitude)
       << ",bias_sigma=" << fmt_double(fx.bias_sigma);
  os << ",noise_std=" << fmt_double(fx.noise_std) << ",seed=" << fx.seed;
  return os.str();
}

} // namespace mbeseg
