#include <algorithm>
#include <cctype>
#include <sstream>

#include "batchsurf/errors.hpp"
#include "batchsurf/pipeline.hpp"
#include "io_util.hpp"

namespace batchsurf {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& value, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(ConfigErrc::BadValue, where + ": '" + value + "' is not a number");
    }
}

int parse_int(const std::string& value, const std::string& where, int min_value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        if (v < min_value)
            throw ConfigError(ConfigErrc::BadValue,
                              where + ": value " + value + " must be >= " +
                                  std::to_string(min_value));
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(ConfigErrc::BadValue, where + ": '" + value + "' is not an integer");
    }
}

bool parse_bool(const std::string& value, const std::string& where) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError(ConfigErrc::BadValue, where + ": '" + value + "' is not a boolean");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::string where = source_name + ":" + std::to_string(line_no);

        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ConfigErrc::BadValue, where + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(ConfigErrc::BadValue, where + ": empty key");

        if (key == "input_dir") {
            config.input_dir = value;
        } else if (key == "output_dir") {
            config.output_dir = value;
        } else if (key == "manifest_path") {
            config.manifest_path = value;
        } else if (key == "threshold_hu") {
            config.segmentation.threshold_hu = parse_double(value, where);
        } else if (key == "padding_vox") {
            config.segmentation.padding_vox = parse_int(value, where, 0);
        } else if (key == "min_component_vox") {
            config.segmentation.min_component_vox = parse_int(value, where, 0);
        } else if (key == "close_gap_vox") {
            config.segmentation.close_gap_vox = parse_int(value, where, 0);
        } else if (key == "iso_hu") {
            config.surface.iso_hu = parse_double(value, where);
        } else if (key == "pad_closed") {
            config.surface.pad_closed = parse_bool(value, where);
        } else if (key == "weld_epsilon") {
            config.surface.weld_epsilon = parse_double(value, where);
        } else if (key == "parallelism") {
            config.parallelism = parse_int(value, where, 1);
        } else if (key == "emit_gifs") {
            config.emit_gifs = parse_bool(value, where);
        } else if (key.rfind("iso_hu.", 0) == 0) {
            const std::string specimen = key.substr(7);
            if (specimen.empty())
                throw ConfigError(ConfigErrc::BadValue, where + ": iso_hu. needs a specimen id");
            config.iso_overrides[specimen] = parse_double(value, where);
        } else {
            throw ConfigError(ConfigErrc::UnknownKey, where + ": unknown key '" + key + "'");
        }
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(detail::read_text_file(path), path.string());
}

}  // namespace batchsurf
