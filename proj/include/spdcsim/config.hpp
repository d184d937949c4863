#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spdcsim {

/// Key-value configuration with dotted-section nesting:
///
///   [crystal.sellmeier.z]
///   a = 3.3134           # comment
///
/// stores "crystal.sellmeier.z.a" -> "3.3134". Values are kept as strings
/// and converted on access.
class ConfigTree {
public:
    static ConfigTree parse_file(const std::string& path);
    static ConfigTree parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void set(const std::string& key, const char* value) { entries_[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;

    /// Overlay: entries of `other` replace entries of *this.
    void merge(const ConfigTree& other);

    /// Sorted "key = value" dump; the canonical form hashed by manifests.
    std::string canonical_dump() const;

private:
    std::map<std::string, std::string> entries_;
};

std::uint64_t fnv1a64(const std::string& data);

} // namespace spdcsim
