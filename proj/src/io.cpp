#include "iaw/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "iaw/errors.hpp"

namespace iaw {

namespace {

// The raw format assumes a little-endian host; all supported targets are.
void write_doubles(std::ofstream& out, const double* p, size_t count) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* p, size_t count) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw config_error("trajectory file truncated");
}

} // namespace

void write_trajectory(const std::string& path, const TrajectoryFile& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for write: " + path);
    out << "iaw-trajectory 1\n";
    out << "n_points " << t.grid.n_points << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t.grid.length);
    out << "length " << buf << "\n";
    out << "fields ";
    for (size_t i = 0; i < t.field_names.size(); ++i)
        out << (i ? "," : "") << t.field_names[i];
    out << "\n";
    out << "times " << t.times.size() << "\n";
    out << "end-header\n";
    write_doubles(out, t.times.data(), t.times.size());
    for (const auto& frame : t.data) {
        if (frame.size() != t.field_names.size())
            throw shape_error("write_trajectory: frame field count mismatch");
        for (const auto& f : frame) {
            if (!(f.grid == t.grid)) throw shape_error("write_trajectory: grid mismatch");
            write_doubles(out, f.v.data(), f.v.size());
        }
    }
}

TrajectoryFile read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open for read: " + path);
    TrajectoryFile t;
    std::string line, key;
    std::getline(in, line);
    if (line != "iaw-trajectory 1") throw config_error("not a trajectory file: " + path);
    int n_points = 0;
    double length = 0.0;
    size_t n_times = 0;
    while (std::getline(in, line)) {
        if (line == "end-header") break;
        std::istringstream ls(line);
        ls >> key;
        if (key == "n_points")
            ls >> n_points;
        else if (key == "length")
            ls >> length;
        else if (key == "times")
            ls >> n_times;
        else if (key == "fields") {
            std::string rest;
            ls >> rest;
            std::istringstream fs(rest);
            std::string name;
            while (std::getline(fs, name, ',')) t.field_names.push_back(name);
        } else
            throw config_error("unknown trajectory header key: " + key);
    }
    t.grid = make_grid(n_points, length);
    t.times.resize(n_times);
    read_doubles(in, t.times.data(), n_times);
    t.data.reserve(n_times);
    for (size_t i = 0; i < n_times; ++i) {
        std::vector<GridField> frame;
        frame.reserve(t.field_names.size());
        for (size_t f = 0; f < t.field_names.size(); ++f) {
            GridField fld(t.grid);
            read_doubles(in, fld.v.data(), fld.v.size());
            frame.push_back(std::move(fld));
        }
        t.data.push_back(std::move(frame));
    }
    return t;
}

CsvWriter::CsvWriter(const std::string& path) {
    auto* f = new std::ofstream(path);
    if (!*f) {
        delete f;
        throw config_error("cannot open for write: " + path);
    }
    out_ = f;
}

CsvWriter::~CsvWriter() { delete static_cast<std::ofstream*>(out_); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    auto& out = *static_cast<std::ofstream*>(out_);
    for (size_t i = 0; i < cells.size(); ++i) {
        const std::string& c = cells[i];
        const bool quote = c.find_first_of(",\"\n\r") != std::string::npos;
        if (i) out << ',';
        if (!quote) {
            out << c;
        } else {
            out << '"';
            for (char ch : c) {
                if (ch == '"') out << '"';
                out << ch;
            }
            out << '"';
        }
    }
    out << "\r\n";
}

std::string CsvWriter::num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw config_error("cannot create directory " + path + ": " + ec.message());
}

} // namespace iaw
