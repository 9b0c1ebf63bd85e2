# v1 API
