#include "spdcsim/config.hpp"

#include <cctype>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spdcsim {

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace((unsigned char)s[b]))
        ++b;
    while (e > b && std::isspace((unsigned char)s[e - 1]))
        --e;
    return s.substr(b, e - b);
}

} // namespace

ConfigTree ConfigTree::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

ConfigTree ConfigTree::parse_string(const std::string& text, const std::string& origin)
{
    ConfigTree tree;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        tree.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return tree;
}

void ConfigTree::set(const std::string& key, double value)
{
    // shortest representation that round-trips
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value)
            break;
    }
    entries_[key] = buf;
}

std::string ConfigTree::get_string(const std::string& key, const std::string& fallback) const
{
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double ConfigTree::get_double(const std::string& key, double fallback) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config key '" + key + "': '" + it->second +
                                 "' is not a number");
    return v;
}

long ConfigTree::get_int(const std::string& key, long fallback) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("config key '" + key + "': '" + it->second +
                                 "' is not an integer");
    return v;
}

bool ConfigTree::get_bool(const std::string& key, bool fallback) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "yes" || v == "1" || v == "on")
        return true;
    if (v == "false" || v == "no" || v == "0" || v == "off")
        return false;
    throw std::runtime_error("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> ConfigTree::get_doubles(const std::string& key,
                                            const std::vector<double>& fallback) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void ConfigTree::merge(const ConfigTree& other)
{
    for (const auto& [k, v] : other.entries_)
        entries_[k] = v;
}

std::string ConfigTree::canonical_dump() const
{
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace spdcsim
