use super::{DataType, Schema};

/// Two tables, `orders.user_id` referencing `users.user_id`.
pub(crate) fn users_orders() -> Schema {
    let mut b = Schema::builder();
    let users = b.add_relation("users");
    let uid = b.add_attribute(&users, "user_id", DataType::Numeric);
    b.add_attribute(&users, "name", DataType::Text);
    b.set_primary_key(&users, [uid.clone()]);
    let orders = b.add_relation("orders");
    let oid = b.add_attribute(&orders, "order_id", DataType::Numeric);
    let ouid = b.add_attribute(&orders, "user_id", DataType::Numeric);
    b.add_attribute(&orders, "placed_at", DataType::Datetime);
    b.set_primary_key(&orders, [oid]);
    b.add_foreign_key(ouid, uid);
    b.build()
}
