# Acceptance harness package (long-horizon scenarios).
