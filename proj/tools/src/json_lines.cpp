#include "json_lines.hpp"

namespace tunnel::cli {

namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

JsonLineIndex::JsonLineIndex(std::string_view text) : text_(text) {
  skip_ws();
  if (pos_ < text_.size()) value("");
}

int JsonLineIndex::line_of(std::string pointer) const {
  while (true) {
    auto it = lines_.find(pointer);
    if (it != lines_.end()) return it->second;
    if (pointer.empty()) return 1;
    pointer.erase(pointer.rfind('/'));
  }
}

void JsonLineIndex::skip_ws() {
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (c == '\n') {
      ++line_;
    } else if (c != ' ' && c != '\t' && c != '\r') {
      return;
    }
    ++pos_;
  }
}

std::string JsonLineIndex::string_token() {
  // Positioned on the opening quote. Escapes are kept raw except \" and \\,
  // which is enough to match object keys used by the scenario format.
  std::string out;
  ++pos_;
  while (pos_ < text_.size() && text_[pos_] != '"') {
    if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
      ++pos_;
    }
    out += text_[pos_++];
  }
  ++pos_;
  return out;
}

void JsonLineIndex::value(const std::string& pointer) {
  lines_.emplace(pointer, line_);
  const char c = text_[pos_];
  if (c == '{') {
    ++pos_;
    skip_ws();
    if (text_[pos_] == '}') {
      ++pos_;
      return;
    }
    while (pos_ < text_.size()) {
      skip_ws();
      const std::string key = string_token();
      skip_ws();
      ++pos_;  // ':'
      skip_ws();
      value(pointer + "/" + escape_pointer_token(key));
      skip_ws();
      if (text_[pos_++] == '}') return;
    }
  } else if (c == '[') {
    ++pos_;
    skip_ws();
    if (text_[pos_] == ']') {
      ++pos_;
      return;
    }
    for (int i = 0; pos_ < text_.size(); ++i) {
      skip_ws();
      value(pointer + "/" + std::to_string(i));
      skip_ws();
      if (text_[pos_++] == ']') return;
    }
  } else if (c == '"') {
    string_token();
  } else {
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
           text_[pos_] != '\n' && text_[pos_] != ' ') {
      ++pos_;
    }
  }
}

}  // namespace tunnel::cli
