#include "iws/json_io.hpp"

#include <fstream>

namespace iws {

using nlohmann::json;

nlohmann::json to_json(const SynthConfig& c) {
    return json{{"n_subjects", c.n_subjects},
                {"trials_per_subject", c.trials_per_subject},
                {"trial_length_samples", c.trial_length_samples},
                {"iws_length_range", c.iws_length_range},
                {"carrier_band_hz", c.carrier_band_hz},
                {"snr", c.snr},
                {"background_std", c.background_std},
                {"seed", c.seed}};
}

namespace {

template <typename T>
void read_field(const json& j, const char* name, T& out) {
    if (!j.contains(name)) return;
    try {
        out = j.at(name).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::ConfigError, std::string(name) + ": wrong type");
    }
}

}  // namespace

SynthConfig synth_config_from_json(const json& j) {
    require(j.is_object(), ErrorKind::ConfigError, "config: expected JSON object");
    SynthConfig c;
    read_field(j, "n_subjects", c.n_subjects);
    read_field(j, "trials_per_subject", c.trials_per_subject);
    read_field(j, "trial_length_samples", c.trial_length_samples);
    read_field(j, "iws_length_range", c.iws_length_range);
    read_field(j, "carrier_band_hz", c.carrier_band_hz);
    read_field(j, "snr", c.snr);
    read_field(j, "background_std", c.background_std);
    read_field(j, "seed", c.seed);
    validate(c);
    return c;
}

json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
    }
}

}  // namespace iws
