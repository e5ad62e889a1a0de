#pragma once
#include <map>
#include <string>
#include <string_view>

namespace tunnel::cli {

// Maps JSON pointers ("/grid/ts/0") to the 1-based line on which the value
// starts. The text must already be valid JSON.
class JsonLineIndex {
 public:
  explicit JsonLineIndex(std::string_view text);

  // Line of the pointer, or of its nearest recorded ancestor.
  int line_of(std::string pointer) const;

 private:
  void value(const std::string& pointer);
  void skip_ws();
  std::string string_token();

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

}  // namespace tunnel::cli
