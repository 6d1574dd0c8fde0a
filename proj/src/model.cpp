#include "ccl/model.hpp"

namespace ccl {

namespace {

struct Builder {
  ArchDescriptor desc;
  Eigen::Index ch = 1;
  Eigen::Index len = 0;
  int conv_idx = 0, bn_idx = 0, fc_idx = 0;

  void conv(int out_ch, int kernel, int stride, int pad) {
    LayerSpec l;
    l.kind = LayerKind::conv;
    l.name = "conv" + std::to_string(++conv_idx);
    l.in_ch = static_cast<int>(ch);
    l.out_ch = out_ch;
    l.kernel = kernel;
    l.stride = stride;
    l.pad = pad;
    len = conv_out_len(len, kernel, stride, pad);
    check_len(l.name);
    l.out_len = len;
    ch = out_ch;
    desc.layers.push_back(std::move(l));
  }
  void bn() {
    LayerSpec l;
    l.kind = LayerKind::bn;
    l.name = "bn" + std::to_string(++bn_idx);
    l.out_ch = static_cast<int>(ch);
    l.out_len = len;
    desc.layers.push_back(std::move(l));
  }
  void relu() {
    LayerSpec l;
    l.kind = LayerKind::relu;
    l.out_len = len;
    desc.layers.push_back(std::move(l));
  }
  void pool(int kernel, int stride) {
    LayerSpec l;
    l.kind = LayerKind::pool;
    l.kernel = kernel;
    l.stride = stride;
    len = conv_out_len(len, kernel, stride, 0);
    check_len("pool");
    l.out_len = len;
    desc.layers.push_back(std::move(l));
  }
  void flatten() {
    LayerSpec l;
    l.kind = LayerKind::flatten;
    l.out_dim = ch * len;
    desc.layers.push_back(std::move(l));
    desc.flatten_dim = ch * len;
  }
  void fc(Eigen::Index out_dim, Eigen::Index in_dim) {
    LayerSpec l;
    l.kind = LayerKind::fc;
    l.name = "fc" + std::to_string(++fc_idx);
    l.in_dim = in_dim;
    l.out_dim = out_dim;
    desc.layers.push_back(std::move(l));
  }
  void check_len(const std::string& where) const {
    if (len < 1)
      throw UnsupportedInputLen("input length " +
                                std::to_string(desc.input_len) +
                                " collapses to nothing at " + where);
  }
};

}  // namespace

ArchDescriptor build_arch(Arch arch, Eigen::Index input_len) {
  if (input_len < 1) throw UnsupportedInputLen("input length must be >= 1");
  Builder b;
  b.desc.arch = arch;
  b.desc.input_len = input_len;
  b.len = input_len;
  if (arch == Arch::TAN) {
    b.conv(64, 11, 4, 5);
    b.relu();
    b.pool(3, 2);
    b.conv(192, 5, 1, 2);
    b.relu();
    b.pool(3, 2);
    b.conv(384, 3, 1, 1);
    b.relu();
    b.conv(256, 3, 1, 1);
    b.relu();
    b.conv(256, 3, 1, 1);
    b.relu();
    b.pool(3, 2);
    b.flatten();
    b.fc(1024, b.desc.flatten_dim);
    b.relu();
    b.fc(1024, 1024);
    b.relu();
    b.fc(input_len, 1024);
  } else {
    b.conv(32, 11, 4, 5);
    b.bn();
    b.relu();
    b.pool(3, 2);
    b.conv(96, 5, 1, 2);
    b.bn();
    b.relu();
    b.pool(3, 2);
    b.conv(128, 3, 1, 1);
    b.bn();
    b.relu();
    b.flatten();
    b.fc(768, b.desc.flatten_dim);
    b.relu();
    b.fc(input_len, 768);
  }
  return b.desc;
}

std::int64_t param_count(const ArchDescriptor& desc) {
  std::int64_t n = 0;
  for (const auto& l : desc.layers) {
    if (l.kind == LayerKind::conv)
      n += static_cast<std::int64_t>(l.out_ch) * l.in_ch * l.kernel + l.out_ch;
    else if (l.kind == LayerKind::fc)
      n += static_cast<std::int64_t>(l.out_dim) * l.in_dim + l.out_dim;
    else if (l.kind == LayerKind::bn)
      n += 2ll * l.out_ch;  // gamma + beta
  }
  return n;
}

std::vector<std::string> tensor_names(const ArchDescriptor& desc) {
  std::vector<std::string> names;
  for (const auto& l : desc.layers) {
    if (l.kind == LayerKind::conv || l.kind == LayerKind::fc) {
      names.push_back(l.name + ".w");
      names.push_back(l.name + ".b");
    } else if (l.kind == LayerKind::bn) {
      names.push_back(l.name + ".gamma");
      names.push_back(l.name + ".beta");
      names.push_back(l.name + ".running_mean");
      names.push_back(l.name + ".running_var");
    }
  }
  return names;
}

}  // namespace ccl
