export class UserRepo {
  getById(id: string) { return id; }
}
