#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "catex/descriptor.hpp"
#include "catex/errors.hpp"

namespace catex::io {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError("bad numeric value '" + s + "'");
    return v;
}

inline std::string format_schedule(const std::vector<LbpConfig>& schedule) {
    std::string out;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(schedule[i].p) + ":" + format_double(schedule[i].r);
    }
    return out;
}

inline std::vector<LbpConfig> parse_schedule(const std::string& text) {
    std::vector<LbpConfig> schedule;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
        const std::size_t colon = pair.find(':');
        if (colon == std::string::npos)
            throw FormatError("bad schedule entry '" + pair + "', expected p:r");
        try {
            schedule.emplace_back(std::stoi(pair.substr(0, colon)),
                                  parse_double(pair.substr(colon + 1)));
        } catch (const ValidationError&) {
            throw;
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError("bad schedule entry '" + pair + "'");
        }
    }
    if (schedule.empty())
        throw FormatError("empty schedule");
    return schedule;
}

/// In-memory form of a descriptor file: the extraction config plus one
/// descriptor row per image.
struct FeatureFile {
    CatexConfig config;
    bool has_tags = false;
    std::vector<std::string> paths;
    std::vector<std::string> labels;
    std::vector<std::string> tags; // empty strings when has_tags is false
    std::vector<std::vector<double>> values;

    std::size_t dimension() const { return values.empty() ? 0 : values[0].size(); }
};

/// Plain-text container: `# key=value` header lines describing the layout,
/// then one `path,label[,tag],v...` row per image. Values round-trip
/// bit-exactly. Fields must not contain commas.
inline void write_features(const std::filesystem::path& path, const FeatureFile& file) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write feature file: " + path.string());

    const std::size_t dim = DescriptorLayout(file.config.iterations, file.config.schedule).total();
    out << "# format=catex-features/1\n";
    out << "# tool=catex/0.1.0\n";
    out << "# alpha=" << format_double(file.config.alpha) << "\n";
    out << "# iterations=" << file.config.iterations << "\n";
    out << "# schedule=" << format_schedule(file.config.schedule) << "\n";
    out << "# tags=" << (file.has_tags ? 1 : 0) << "\n";
    out << "# dim=" << dim << "\n";

    for (std::size_t i = 0; i < file.values.size(); ++i) {
        if (file.paths[i].find(',') != std::string::npos ||
            file.labels[i].find(',') != std::string::npos ||
            (file.has_tags && file.tags[i].find(',') != std::string::npos))
            throw ValidationError("feature rows cannot contain commas: " + file.paths[i]);
        if (file.values[i].size() != dim)
            throw ValidationError("descriptor length does not match the config layout");
        out << file.paths[i] << "," << file.labels[i];
        if (file.has_tags)
            out << "," << file.tags[i];
        for (double v : file.values[i])
            out << "," << format_double(v);
        out << "\n";
    }
    if (!out)
        throw IoError("cannot write feature file: " + path.string());
}

inline FeatureFile read_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open feature file: " + path.string());

    FeatureFile file;
    bool saw_format = false;
    std::size_t dim = 0;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fail = [&](const std::string& what) {
            throw FormatError("feature file " + path.string() + " line " +
                              std::to_string(line_number) + ": " + what);
        };

        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ')
                body.erase(0, 1);
            const std::size_t eq = body.find('=');
            if (eq == std::string::npos)
                continue; // free-form comment
            const std::string key = body.substr(0, eq);
            const std::string value = body.substr(eq + 1);
            if (key == "format") {
                if (value != "catex-features/1")
                    fail("unsupported format '" + value + "'");
                saw_format = true;
            } else if (key == "alpha") {
                file.config.alpha = parse_double(value);
            } else if (key == "iterations") {
                file.config.iterations = std::stoi(value);
            } else if (key == "schedule") {
                file.config.schedule = parse_schedule(value);
            } else if (key == "tags") {
                file.has_tags = value == "1";
            } else if (key == "dim") {
                dim = std::stoull(value);
            }
            continue;
        }

        if (!saw_format)
            fail("missing format header");
        const std::size_t meta = file.has_tags ? 3 : 2;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != meta + dim)
            fail("expected " + std::to_string(meta + dim) + " fields, found " +
                 std::to_string(fields.size()));

        file.paths.push_back(fields[0]);
        file.labels.push_back(fields[1]);
        file.tags.push_back(file.has_tags ? fields[2] : std::string());
        std::vector<double> row(dim);
        for (std::size_t i = 0; i < dim; ++i)
            row[i] = parse_double(fields[meta + i]);
        file.values.push_back(std::move(row));
    }

    if (!saw_format)
        throw FormatError("feature file " + path.string() + ": missing format header");
    if (dim == 0 || file.values.empty())
        throw FormatError("feature file " + path.string() + ": no descriptor rows");

    const std::size_t expected =
        DescriptorLayout(file.config.iterations, file.config.schedule).total();
    if (dim != expected)
        throw FormatError("feature file " + path.string() +
                          ": dim header does not match the config layout");
    return file;
}

} // namespace catex::io
