# Utils package - 설정, 에러 처리, 헬퍼
