#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "catex/errors.hpp"
#include "catex/image.hpp"
#include "catex/image_io.hpp"
#include "catex/random.hpp"

namespace catex::dataset {

struct ManifestEntry {
    std::string path;
    std::string label;
    std::string sample_tag; // empty when the manifest carries no tags
};

/// A labeled image listing. Tags, when present, identify acquisition samples
/// and drive the sample-holdout protocol.
struct DatasetManifest {
    std::string name;
    std::vector<ManifestEntry> entries;
    bool has_tags = false;

    std::vector<std::string> labels() const {
        std::vector<std::string> out(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i)
            out[i] = entries[i].label;
        return out;
    }

    std::vector<std::string> distinct_labels() const {
        std::set<std::string> s;
        for (const auto& e : entries)
            s.insert(e.label);
        return std::vector<std::string>(s.begin(), s.end());
    }

    std::vector<std::string> distinct_tags() const {
        std::set<std::string> s;
        for (const auto& e : entries)
            if (!e.sample_tag.empty())
                s.insert(e.sample_tag);
        return std::vector<std::string>(s.begin(), s.end());
    }
};

/// Parses a manifest file: one `path<TAB>label[<TAB>sample_tag]` entry per
/// line, `#` comments, UTF-8. Relative paths resolve against the manifest's
/// directory. Every referenced file must exist.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest: " + path.string());
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");

    DatasetManifest manifest;
    manifest.name = path.stem().string();

    std::set<std::string> seen_paths;
    int tagged = 0, untagged = 0;
    std::string line;
    for (int line_number = 1; std::getline(in, line); ++line_number) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        const auto fail = [&](const std::string& what) {
            throw FormatError("manifest " + path.string() + " line " +
                              std::to_string(line_number) + ": " + what);
        };
        if (fields.size() < 2 || fields.size() > 3)
            fail("expected path<TAB>label[<TAB>sample_tag]");
        if (fields[0].empty() || fields[1].empty())
            fail("empty path or label");
        if (fields.size() == 3 && fields[2].empty())
            fail("empty sample_tag");

        ManifestEntry entry;
        entry.path = (base / fields[0]).lexically_normal().string();
        entry.label = fields[1];
        if (fields.size() == 3) {
            entry.sample_tag = fields[2];
            ++tagged;
        } else {
            ++untagged;
        }

        if (!seen_paths.insert(entry.path).second)
            fail("duplicate path '" + entry.path + "'");
        if (!std::filesystem::exists(entry.path))
            fail("missing image file '" + entry.path + "'");
        manifest.entries.push_back(std::move(entry));
    }

    if (manifest.entries.empty())
        throw ValidationError("manifest " + path.string() + ": no entries");
    if (tagged > 0 && untagged > 0)
        throw FormatError("manifest " + path.string() +
                          ": sample_tag must appear on every entry or on none");
    manifest.has_tags = tagged > 0;
    if (manifest.distinct_labels().size() < 2)
        throw ValidationError("manifest " + path.string() + ": need at least 2 distinct labels");
    return manifest;
}

enum class Protocol { RandomHalf, SampleHoldout };

inline Protocol parse_protocol(const std::string& name) {
    if (name == "random-half") return Protocol::RandomHalf;
    if (name == "sample-holdout") return Protocol::SampleHoldout;
    throw ValidationError("unknown protocol '" + name + "'");
}

struct SplitSpec {
    Protocol protocol = Protocol::RandomHalf;
    int rounds = 10;
    std::uint64_t seed = 0;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

namespace dataset_detail {

/// Random-half round: per class, a seeded shuffle sends ceil(n/2) samples to
/// train and the rest to test.
inline Split random_half_round(const std::vector<std::string>& labels, std::uint64_t seed,
                               int round) {
    std::set<std::string> classes(labels.begin(), labels.end());
    Split split;
    std::size_t class_index = 0;
    for (const std::string& cls : classes) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls)
                members.push_back(i);
        if (members.size() < 2)
            throw ValidationError("random-half: class '" + cls + "' has fewer than 2 samples");
        SplitMix64 rng(mix_seed(seed, (static_cast<std::uint64_t>(round) << 20) + class_index));
        deterministic_shuffle(members, rng);
        const std::size_t train_count = (members.size() + 1) / 2;
        split.train.insert(split.train.end(), members.begin(), members.begin() + train_count);
        split.test.insert(split.test.end(), members.begin() + train_count, members.end());
        ++class_index;
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

} // namespace dataset_detail

/// Expands a split protocol into per-round train/test index lists. Train and
/// test are always disjoint and cover the manifest.
inline std::vector<Split> make_splits(const DatasetManifest& manifest, const SplitSpec& spec) {
    if (spec.rounds < 1)
        throw ValidationError("make_splits: rounds must be positive");

    std::vector<Split> splits;
    if (spec.protocol == Protocol::RandomHalf) {
        const auto labels = manifest.labels();
        for (int r = 0; r < spec.rounds; ++r)
            splits.push_back(dataset_detail::random_half_round(labels, spec.seed, r));
    } else {
        if (!manifest.has_tags)
            throw ValidationError("sample-holdout: manifest carries no sample tags");
        const auto tags = manifest.distinct_tags();
        if (static_cast<std::size_t>(spec.rounds) > tags.size())
            throw ValidationError("sample-holdout: more rounds than distinct sample tags");
        for (int r = 0; r < spec.rounds; ++r) {
            Split split;
            for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
                if (manifest.entries[i].sample_tag == tags[r])
                    split.train.push_back(i);
                else
                    split.test.push_back(i);
            }
            splits.push_back(std::move(split));
        }
    }
    return splits;
}

/// Synthetic texture classes for desk-scale tests: oriented sinusoidal
/// gratings with class-specific orientation and frequency plus seeded
/// additive noise. Writes 8-bit PGM images plus a manifest file into
/// `out_dir` and returns the loaded-equivalent manifest.
inline DatasetManifest generate_synthetic(int classes, int per_class, int size,
                                          std::uint64_t seed,
                                          const std::filesystem::path& out_dir,
                                          double noise_amplitude = 0.05) {
    if (classes < 2)
        throw ValidationError("generate_synthetic: need at least 2 classes");
    if (per_class < 1 || size < 1)
        throw ValidationError("generate_synthetic: per_class and size must be positive");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create directory: " + out_dir.string());

    DatasetManifest manifest;
    manifest.name = "synthetic";

    std::ostringstream listing;
    listing << "# synthetic textures: classes=" << classes << " per_class=" << per_class
            << " size=" << size << " seed=" << seed << "\n";

    for (int c = 0; c < classes; ++c) {
        const double theta = std::numbers::pi * c / classes;
        const double frequency = 6.0 + 2.0 * (c % 3);
        const double cos_t = std::cos(theta);
        const double sin_t = std::sin(theta);
        char label[16];
        std::snprintf(label, sizeof label, "class%02d", c);

        for (int i = 0; i < per_class; ++i) {
            SplitMix64 rng(mix_seed(seed, (static_cast<std::uint64_t>(c) << 32) + i));
            GrayImage img(size, size);
            for (int y = 0; y < size; ++y) {
                for (int x = 0; x < size; ++x) {
                    const double phase =
                        2.0 * std::numbers::pi * frequency * (x * cos_t + y * sin_t) / size;
                    double v = 0.5 + 0.4 * std::sin(phase);
                    if (noise_amplitude > 0.0)
                        v += noise_amplitude * (2.0 * rng.next_unit() - 1.0);
                    img(x, y) = std::clamp(v, 0.0, 1.0);
                }
            }
            char name[48];
            std::snprintf(name, sizeof name, "%s_img%03d.pgm", label, i);
            io::save_pgm(img, out_dir / name);
            listing << name << "\t" << label << "\n";
            manifest.entries.push_back({(out_dir / name).string(), label, ""});
        }
    }

    std::ofstream listing_file(out_dir / "manifest.tsv");
    if (!listing_file)
        throw IoError("cannot write manifest: " + (out_dir / "manifest.tsv").string());
    listing_file << listing.str();
    return manifest;
}

} // namespace catex::dataset
