#include <cstdio>
#include <fstream>
#include <sstream>

#include "meltpinn/network/network.hpp"

namespace meltpinn::nn {

namespace {

constexpr const char* kMagic = "meltpinn-checkpoint";

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::istringstream next(const std::string& expect) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line.empty() || line[0] == '#') continue;
      return std::istringstream(line);
    }
    throw ParseError("checkpoint ended early, expected " + expect, line_ + 1);
  }
  long line() const { return line_; }

 private:
  std::istringstream in_;
  long line_ = 0;
};

template <typename V>
void read_values(LineReader& r, V& target, Eigen::Index count, const std::string& what) {
  auto ls = r.next(what);
  for (Eigen::Index i = 0; i < count; ++i) {
    std::string tok;
    if (!(ls >> tok)) throw ParseError(what + ": expected " + std::to_string(count) + " values", r.line());
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ParseError(what + ": bad number '" + tok + "'", r.line());
    target.data()[i] = v;
  }
  std::string extra;
  if (ls >> extra) throw ParseError(what + ": too many values", r.line());
}

}  // namespace

std::string to_checkpoint_string(const NetworkParams<double>& net) {
  net.validate();
  std::ostringstream out;
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "activation " << (net.hidden_activation == Activation::Swish ? "swish" : "identity") << '\n';
  out << "layers";
  for (int s : net.layer_sizes) out << ' ' << s;
  out << '\n';
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    // Row-major, one matrix per line.
    const auto& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (r || c ? " " : "") << fmt17(w(r, c));
    out << '\n';
    const auto& b = net.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) out << (i ? " " : "") << fmt17(b.data()[i]);
    out << '\n';
  }
  return out.str();
}

NetworkParams<double> from_checkpoint_string(const std::string& text) {
  LineReader r(text);
  NetworkParams<double> net;
  {
    auto ls = r.next("header");
    std::string magic;
    int version = -1;
    if (!(ls >> magic >> version) || magic != kMagic) throw ParseError("not a checkpoint file", r.line());
    if (version != kCheckpointVersion)
      throw ParseError("unsupported checkpoint version " + std::to_string(version), r.line());
  }
  {
    auto ls = r.next("activation");
    std::string key, name;
    if (!(ls >> key >> name) || key != "activation") throw ParseError("expected 'activation <name>'", r.line());
    if (name == "swish") net.hidden_activation = Activation::Swish;
    else if (name == "identity") net.hidden_activation = Activation::Identity;
    else throw ParseError("unknown activation '" + name + "'", r.line());
  }
  {
    auto ls = r.next("layers");
    std::string key;
    if (!(ls >> key) || key != "layers") throw ParseError("expected 'layers ...'", r.line());
    int s;
    while (ls >> s) {
      if (s < 1) throw ParseError("layer sizes must be positive", r.line());
      net.layer_sizes.push_back(s);
    }
    if (net.layer_sizes.size() < 2) throw ParseError("need at least two layer sizes", r.line());
  }
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(net.layer_sizes[l + 1],
                                                                            net.layer_sizes[l]);
    read_values(r, w, w.size(), "weights " + std::to_string(l));
    Eigen::VectorXd b(net.layer_sizes[l + 1]);
    read_values(r, b, b.size(), "biases " + std::to_string(l));
    net.weights.emplace_back(w);
    net.biases.push_back(std::move(b));
  }
  net.validate();
  return net;
}

void save_checkpoint(const NetworkParams<double>& net, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write checkpoint " + path);
    f << to_checkpoint_string(net);
    if (!f) throw std::runtime_error("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move checkpoint into " + path);
}

NetworkParams<double> load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_checkpoint_string(ss.str());
}

}  // namespace meltpinn::nn
