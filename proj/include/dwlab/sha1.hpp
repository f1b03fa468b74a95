// SHA-1 digests for run manifests.
//
// The interesting entry point is git_blob_sha1: it frames the content the way
// git frames a blob object ("blob <size>\0" + content) before hashing, so the
// manifest hash of a resolved configuration can be cross-checked with
// `git hash-object` on the extracted block.

#pragma once

#include <cstddef>
#include <string>

namespace dwlab {

// Lowercase 40-hex-digit SHA-1 of the raw bytes.
std::string sha1_hex(const void* data, std::size_t len);
std::string sha1_hex(const std::string& bytes);

// SHA-1 of "blob <len>\0<content>", matching `git hash-object --stdin`.
std::string git_blob_sha1(const std::string& content);

}  // namespace dwlab
