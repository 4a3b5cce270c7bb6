# DTOs package
