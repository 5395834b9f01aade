#include "batnet/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "batnet/errors.hpp"

namespace batnet {

int ModemConfig::data_blocks_for(std::size_t payload_bytes) const {
    const std::size_t bits = payload_bytes * 8;
    return static_cast<int>((bits + block_data_bits - 1) / block_data_bits);
}

int ModemConfig::frame_symbols_for(std::size_t payload_bytes) const {
    const int blocks = 1 + data_blocks_for(payload_bytes);  // header + data
    return framing_symbols() + blocks * block_symbols();
}

void ModemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigInvalid(msg); };

    if (sample_rate_hz <= 0.0) fail("sample_rate_hz must be positive");
    if (carrier_freq_hz <= 0.0) fail("carrier_freq_hz must be positive");
    if (carrier_freq_hz >= sample_rate_hz / 2.0)
        fail("carrier_freq_hz must be below Nyquist");
    if (symbol_period_samples <= 0) fail("symbol_period_samples must be positive");
    if (transition_samples <= 0) fail("transition_samples must be positive");
    if (transition_samples >= symbol_period_samples)
        fail("transition_samples must be shorter than the symbol period");
    if (amplitude <= 0.0 || amplitude > 1.0) fail("amplitude must be in (0, 1]");
    if (preamble_symbols < 4) fail("preamble_symbols too small to gate on");
    if (sync_pattern.empty()) fail("sync_pattern must not be empty");
    for (int s : sync_pattern)
        if (s < 0 || s >= kConstellationSize) fail("sync_pattern index out of range");
    for (int s : trailer_pattern)
        if (s < 0 || s >= kConstellationSize) fail("trailer_pattern index out of range");
    if (block_data_bits <= 0 || block_crc_bits <= 0)
        fail("block bit counts must be positive");
    if ((block_data_bits + block_crc_bits) % kBitsPerSymbol != 0)
        fail("block bits must pack into whole symbols");
    if (block_crc_bits > 8) fail("block_crc_bits above 8 is not supported");
    if ((crc_poly >> block_crc_bits) != 1u)
        fail("crc_poly must have degree block_crc_bits");
    if (crc_init >> block_crc_bits) fail("crc_init wider than the CRC register");
    if (phase_search_halfwidth_rad <= 0.0) fail("phase_search_halfwidth_rad must be positive");
    if (phase_search_steps < 3 || phase_search_steps % 2 == 0)
        fail("phase_search_steps must be odd and at least 3");
    if (max_symbol_flips < 0 || max_symbol_flips > block_symbols())
        fail("max_symbol_flips out of range");
    if (gate_threshold_factor <= 0.0 || gate_threshold_factor >= 1.0)
        fail("gate_threshold_factor must be in (0, 1)");
    if (sync_corr_threshold <= 0.0 || sync_corr_threshold > 1.0)
        fail("sync_corr_threshold must be in (0, 1]");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<int> parse_index_list(const std::string& value) {
    std::vector<int> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

}  // namespace

ModemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file: " + path);

    ModemConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "sample_rate_hz") config.sample_rate_hz = std::stod(value);
            else if (key == "carrier_freq_hz") config.carrier_freq_hz = std::stod(value);
            else if (key == "symbol_period_samples") config.symbol_period_samples = std::stoi(value);
            else if (key == "transition_samples") config.transition_samples = std::stoi(value);
            else if (key == "amplitude") config.amplitude = std::stod(value);
            else if (key == "preamble_symbols") config.preamble_symbols = std::stoi(value);
            else if (key == "sync_pattern") config.sync_pattern = parse_index_list(value);
            else if (key == "trailer_pattern") config.trailer_pattern = parse_index_list(value);
            else if (key == "block_data_bits") config.block_data_bits = std::stoi(value);
            else if (key == "block_crc_bits") config.block_crc_bits = std::stoi(value);
            else if (key == "crc_poly") config.crc_poly = std::stoul(value, nullptr, 0);
            else if (key == "crc_init") config.crc_init = std::stoul(value, nullptr, 0);
            else if (key == "phase_search_halfwidth_rad") config.phase_search_halfwidth_rad = std::stod(value);
            else if (key == "phase_search_steps") config.phase_search_steps = std::stoi(value);
            else if (key == "max_symbol_flips") config.max_symbol_flips = std::stoi(value);
            else if (key == "gate_threshold_factor") config.gate_threshold_factor = std::stod(value);
            else if (key == "sync_corr_threshold") config.sync_corr_threshold = std::stod(value);
            else
                throw ConfigInvalid(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const ConfigInvalid&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigInvalid(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    return config;
}

}  // namespace batnet
